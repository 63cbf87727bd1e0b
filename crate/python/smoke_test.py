#!/usr/bin/env python3
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Smoke test for the fourq_py extension module.

Build and stage the module first:

    cargo build --release -p fourq-py
    cp target/release/libfourq_py.so python/fourq_py.so

then run `python3 python/smoke_test.py`.
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import fourq_py  # noqa: E402


def check(cond, msg):
    if not cond:
        raise SystemExit(f"FAIL: {msg}")
    print(f"ok: {msg}")


def main():
    # GHZ seed: classify, verdict
    ghz = fourq_py.seed_state("GHZ")
    check(len(ghz) == 16, "seed returns 16 amplitudes")
    norm = math.fsum(re * re + im * im for re, im in ghz)
    check(abs(norm - 1.0) < 1e-12, "seed is normalized")

    cls = fourq_py.classify_state(ghz)
    check(cls["family"] == "GHZ", f"GHZ classifies as GHZ (got {cls['family']})")

    v = fourq_py.verdict_state(ghz)
    check(v["in_mes"] and v["convertible"] and not v["reachable"], "GHZ verdict flags")
    check(v["mixed_marginals_fast_path"], "GHZ has completely mixed marginals")

    # W class with a nonzero |0000> coefficient is reachable
    w = fourq_py.seed_state("W")
    wcls = fourq_py.classify_state(w)
    check(wcls["family"] == "W", "W classifies as W")

    # random in-family state round-trips through classification
    psi = fourq_py.random_state("Labc2_generic", rng_seed=3, cond=4.0)
    cls2 = fourq_py.classify_state(psi)
    check(cls2["family"] == "Labc2_generic", "random Labc2 state classifies back")

    # reproducibility
    psi2 = fourq_py.random_state("Labc2_generic", rng_seed=3, cond=4.0)
    check(psi == psi2, "random_state is reproducible")

    # LU equivalence of a state with itself
    eq, dist = fourq_py.lu_equivalent_states(psi, psi)
    check(eq and dist < 1e-10, "state is LU-equivalent to itself")

    # symmetry table summary
    sym = fourq_py.symmetry_summary(ghz)
    check(sym["finite_count"] == 2, "GHZ finite symmetry part")
    check(len(sym["continuous"]) == 1, "GHZ continuous symmetry family")

    # standard form of a generic random state
    haar = fourq_py.random_state("Gabcd_generic", rng_seed=1, cond=3.0)
    sf = fourq_py.standard_form_state(haar)
    check(sf["family"] == "Gabcd_generic", "standard form family")
    check(len(sf["blochs"]) == 4, "standard form carries four Bloch vectors")

    # protocol synthesis for a reachable W-class target
    import_random = fourq_py.random_state("W", rng_seed=9, cond=3.0)
    verdict_w = fourq_py.verdict_state(import_random)
    if verdict_w["reachable"]:
        proto = fourq_py.protocol_for(import_random)
        check(proto["all_pass"], "synthesized protocol verifies")
        check(
            proto["completeness_deficit"] < 1e-10,
            "protocol POVM completeness",
        )
        check(abs(sum(proto["weights"]) - 1.0) < 1e-10, "branch weights sum to one")

    print("all smoke tests passed")


if __name__ == "__main__":
    main()
