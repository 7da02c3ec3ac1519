import json

import pytest

import turnpike


def test_delta_and_partitions():
    y = turnpike.delta([0, 2, 5, 9])
    assert y.exact
    assert y.values == [9, 7, 5, 4, 3, 2]
    assert y.point_count == 4
    assert len(turnpike.two_partitions(y)) == 10


def test_worked_multiplicities():
    y = turnpike.DistanceMultiset([2, 6, 4], [3, 1, 2])
    assert y.values == [6, 4, 2]
    assert sorted(turnpike.two_partitions(y)) == [(1, 2, 0), (2, 1, 0), (2, 2, 1)]


def test_pipeline_realizable_and_not():
    y = turnpike.delta([0, 1, 4, 10, 12, 17])
    res = turnpike.run_pipeline(y)
    assert res["certificate"] == "realizable"
    assert res["verified"]
    assert turnpike.delta(res["coords"]) == y

    bad = turnpike.DistanceMultiset([1, 2, 4], [1, 1, 1])
    assert turnpike.oracle(bad) == "not_realizable"
    assert turnpike.run_pipeline(bad)["certificate"] == "not_realizable"


def test_milp_and_relaxation():
    y = turnpike.delta([0, 2, 5, 9])
    assert turnpike.run_pipeline(y, form="milp")["certificate"] == "realizable"
    lp = turnpike.run_pipeline(y, form="tri-lp")
    assert lp["status"] == "feasible"


def test_noise_and_generation_are_seeded():
    xs, y = turnpike.generate("digest_linear", 6, seed=4, genome_length=50)
    assert len(xs) == 6
    a = turnpike.perturb(y, 0.1, 0.5, seed=1)
    b = turnpike.perturb(y, 0.1, 0.5, seed=1)
    assert a == b
    assert all(abs(v / 0.5 - round(v / 0.5)) < 1e-9 for v in a)


def test_metrics():
    assert turnpike.kendall_tau([0, 1, 2, 3], [0, 1, 2, 3]) == 0.0
    assert turnpike.kendall_tau([3, 2, 1, 0], [0, 1, 2, 3]) == 1.0
    assert turnpike.kendall_tau([1, 0, 2, 3], [0, 1, 2, 3]) == pytest.approx(1 / 6)
    rho = [[0, 2, 5], [-2, 0, 3], [-5, -3, 0]]
    assert turnpike.coords_least_squares(rho) == pytest.approx([0, 2, 5])


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        turnpike.DistanceMultiset([1, 2], [1, 0])


def test_cli_round_trip():
    code, out, _ = turnpike.run_cli(["gen", "--dist", "digest_linear", "--n", "5", "--seed", "3"])
    assert code == 0
    inst = json.loads(out)
    assert inst["n"] == 5
    code, out, _ = turnpike.run_cli(["pipeline", "--coords", "--verify"], out)
    assert code == 0
    assert json.loads(out)["certificate"] == "realizable"
    assert turnpike.run_cli([])[0] == 1
