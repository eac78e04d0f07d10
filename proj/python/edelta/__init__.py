"""Energy regression testing from developers' tests.

Thin pythonic wrapper over the compiled core: diff-based test selection,
coverage-weighted energy deltas, Tarantula localization and the deterministic
simulation lab.
"""

import json as _json

from _edelta import (  # noqa: F401
    EdeltaError,
    coefficient_of_variation,
    median,
    mix64,
    population_stddev,
    quartile_coefficient_of_dispersion,
    ranges_disjoint,
    summarize,
)
import _edelta as _core

__all__ = [
    "EdeltaError",
    "burn",
    "coefficient_of_variation",
    "localize",
    "median",
    "mix64",
    "parse_diff",
    "population_stddev",
    "quartile_coefficient_of_dispersion",
    "ranges_disjoint",
    "run_scenario",
    "select_tests",
    "summarize",
    "weighted_verdict",
]


def _dump(value):
    return value if isinstance(value, str) else _json.dumps(value)


def parse_diff(diff_text):
    """Parse a unified diff into deletions (v1 lines), additions (v2 lines)
    and touched files."""
    return _json.loads(_core.parse_diff_json(diff_text))


def select_tests(diff_text, coverage_v1, coverage_v2, tests_glob=()):
    """Select the tests covering the diff, discarding tests the diff itself
    modifies. Coverage arguments are dicts or JSON strings."""
    return _json.loads(
        _core.select_tests_json(
            diff_text, _dump(coverage_v1), _dump(coverage_v2), list(tests_glob)
        )
    )


def weighted_verdict(diff_text, coverage_v1, coverage_v2, per_test_deltas, threshold=0.0):
    """Coverage-weighted commit delta: line weights (theta/phi), per-test
    omega and the commit-level delta_omega."""
    return _json.loads(
        _core.weighted_verdict_json(
            diff_text, _dump(coverage_v1), _dump(coverage_v2), dict(per_test_deltas), threshold
        )
    )


def localize(diff_text, coverage_v1, coverage_v2, per_test_deltas):
    """Tarantula ranking of the changed lines; tests with a positive delta
    count as failing."""
    return _json.loads(
        _core.localize_json(
            diff_text, _dump(coverage_v1), _dump(coverage_v2), dict(per_test_deltas)
        )
    )


def run_scenario(scenario):
    """Run a simulation-lab scenario (stability/detection/localization)."""
    return _json.loads(_core.run_scenario_json(_dump(scenario)))


def burn(payload_uj, seed=42, spec=None):
    """Consume an energy payload against the simulated probe; returns the
    burn result (consumed_uj, iterations, final_random)."""
    if spec is None:
        spec = {"seed": 0, "read_quantum_uj": 10.0}
    return _json.loads(_core.burn_simulated_json(payload_uj, seed, _dump(spec)))
