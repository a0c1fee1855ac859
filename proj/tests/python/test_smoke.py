import json

import qdlab


def test_forms():
    assert qdlab.q_form([1], [2]) == 2.0
    assert qdlab.r_form([1], [2]) == 4.5
    assert qdlab.r_form([1, 0], [0, 1]) == 1.0  # 0.5|x|^2 + 0.5|x*|^2 + <x,x*>


def test_identity_suite_passes():
    report = json.loads(qdlab.run_suite_json("identities", seed=7))
    assert report["all_pass"] is True
    assert report["config"]["seed"] == 7
    assert {row["suite"] for row in report["rows"]} == {"identities"}


def test_probe_line_half_gap():
    doc = json.loads(qdlab.probe_json('{"repr":"linear","matrix":[[-1]]}', "[[[1],[0]]]"))
    assert doc["summary"]["NotQuasidense"] == 1
    cert = doc["certificates"][0]
    assert cert["verdict"] == "not-quasidense"
    assert abs(cert["inf_estimate"] - 0.5) <= 1e-9
    assert abs(cert["lower_bound"] - 0.5) <= 1e-9


def test_conjugate_half_square_self():
    axis = {"lo": -4.0, "hi": 4.0, "n": 129}
    xs = [axis["lo"] + 0.0625 * i for i in range(129)]
    f = {"axes": [axis], "values": [0.5 * x * x for x in xs]}
    out = json.loads(qdlab.conjugate_json(json.dumps(f), "-1:1:5"))
    ys = [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert out["axes"] == [{"lo": -1.0, "hi": 1.0, "n": 5}]
    for y, v in zip(ys, out["values"]):
        assert abs(v - 0.5 * y * y) <= 1e-12


def test_gallery_rules():
    assert qdlab.tail_apply([1.0]) == [1.0]
    assert qdlab.bs_apply([0.0, 1.0]) == [2.0, 1.0]
    x = [0.4, -0.4]
    sx = qdlab.skew_apply(x)
    assert abs(sum(a * b for a, b in zip(x, sx))) <= 1e-12
    r, chain = qdlab.skew_bound(x)
    assert abs(chain - 0.1) <= 1e-12
    assert r >= 0.1 - 1e-12
    assert qdlab.k_conjugate(3.0) == 9.0
