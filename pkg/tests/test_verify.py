"""The bundled verification suites at their default configuration."""

from bkising.verify import dual_enumerable_sizes, enumerable_sizes, run_verification


def test_enumerable_size_generators():
    sizes = enumerable_sizes(20)
    assert all(s.n_cols % 2 == 0 and s.n_sites <= 20 for s in sizes)
    assert len({(s.m_rows, s.n_cols) for s in sizes}) == len(sizes)
    even = enumerable_sizes(20, m_even=True)
    assert all(s.m_rows % 2 == 0 for s in even)
    duals = dual_enumerable_sizes(20)
    assert all((s.m_rows + 1) * s.n_cols <= 20 for s in duals)


def test_default_verification_contract():
    # the CLI default (max_spins 20, trials 10, seed 42) must pass everything
    report = run_verification(max_spins=20, trials=10, seed=42)
    assert report["passed"], {
        s: agg for s, agg in report["suites"].items() if agg["failed"]
    }
    assert report["failed_cases"] == 0
    expected_suites = {"oracle_symbolic", "oracle_transfer", "closed_h0", "closed_ipi2",
                       "lemma_zb", "staggered_chain"}
    assert expected_suites <= set(report["suites"])
    for agg in report["suites"].values():
        assert agg["max_residual"] < 1e-9
