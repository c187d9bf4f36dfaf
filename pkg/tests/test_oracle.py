import pytest

from desv.automaton import FaultSpec, SecretSpec, validate
from desv.concealment import OpacityQuery, OpacityWitness, check_standard_opacity, check_strong_opacity
from desv.inference import (
    InferenceWitness,
    check_diagnosability,
    check_predictability,
    check_strong_detectability,
)
from desv.oracle import (
    BudgetExceededError,
    DefinitionalClaim,
    GeneratorError,
    GeneratorParams,
    MalformedClaimError,
    bounded_definitional_search,
    random_lfsa,
    validate_witness,
)


class TestValidateInferenceWitnesses:
    def test_s2_star_witness_valid(self, s2):
        verdict = check_strong_detectability(s2, "star")
        ok, why = validate_witness(
            s2, DefinitionalClaim("star-sd", verdict.witness)
        )
        assert ok, why

    def test_s2_omega_witness_valid(self, s2):
        verdict = check_strong_detectability(s2, "omega")
        ok, why = validate_witness(
            s2, DefinitionalClaim("omega-sd", verdict.witness)
        )
        assert ok, why

    def test_s3_diag_witness_valid(self, s3, s3_faults):
        verdict = check_diagnosability(s3, s3_faults)
        ok, why = validate_witness(
            s3, DefinitionalClaim("diag", verdict.witness, faults=s3_faults)
        )
        assert ok, why

    def test_s3_pred_witness_valid(self, s3, s3_faults):
        verdict = check_predictability(s3, s3_faults)
        ok, why = validate_witness(
            s3, DefinitionalClaim("pred", verdict.witness, faults=s3_faults)
        )
        assert ok, why

    def test_fabricated_cycle_rejected(self, s2):
        # claims a pump cycle over a transition that does not exist
        fake = InferenceWitness(
            property="star-sd",
            k_used=9,
            prefix=(),
            cycle=(((("q0"), ("q0")), ("e3", "e3"), (("q0"), ("q0"))),),
            tail=(),
        )
        ok, why = validate_witness(s2, DefinitionalClaim("star-sd", fake))
        assert not ok
        assert "not a transition" in why

    def test_dangling_state_is_malformed(self, s2):
        fake = InferenceWitness(
            property="star-sd",
            k_used=9,
            cycle=((("zz", "q0"), ("e1", "e1"), ("zz", "q0")),),
        )
        with pytest.raises(MalformedClaimError):
            validate_witness(s2, DefinitionalClaim("star-sd", fake))

    def test_matched_end_pair_rejected(self, s2):
        fake = InferenceWitness(
            property="star-sd",
            k_used=9,
            cycle=((("q0", "q0"), ("e1", "e1"), ("q0", "q0")),),
            tail=((("q0", "q0"), ("e3", "e3"), ("q1", "q1")),),
        )
        ok, why = validate_witness(s2, DefinitionalClaim("star-sd", fake))
        assert not ok
        assert "matched state pair" in why


class TestValidateOpacityWitnesses:
    def test_cso_witness_valid(self, s2):
        verdict = check_standard_opacity(
            s2, OpacityQuery("cso", SecretSpec.of(["q1"]))
        )
        ok, why = validate_witness(
            s2,
            DefinitionalClaim("cso", verdict.witness, secrets=SecretSpec.of(["q1"])),
        )
        assert ok, why

    def test_iso_witness_valid(self, s2):
        verdict = check_standard_opacity(
            s2, OpacityQuery("iso", SecretSpec.of(["q0"]))
        )
        ok, why = validate_witness(
            s2,
            DefinitionalClaim("iso", verdict.witness, secrets=SecretSpec.of(["q0"])),
        )
        assert ok, why

    def test_infso_witness_valid(self, s2):
        secrets = SecretSpec.of(["q1"])
        verdict = check_standard_opacity(s2, OpacityQuery("infso", secrets))
        ok, why = validate_witness(
            s2, DefinitionalClaim("infso", verdict.witness, secrets=secrets)
        )
        assert ok, why

    def test_kso_witness_valid(self, s2):
        secrets = SecretSpec.of(["q1"])
        verdict = check_standard_opacity(s2, OpacityQuery("kso", secrets, k=1))
        ok, why = validate_witness(
            s2, DefinitionalClaim("kso", verdict.witness, secrets=secrets, k=1)
        )
        assert ok, why

    def test_strong_witnesses_valid(self, s4, s4_secrets, s5, s5_secrets):
        cases = [
            (s4, s4_secrets, "scso", None),
            (s5, s5_secrets, "sinfso", None),
            (s5, s5_secrets, "skso", 1),
            (s5, SecretSpec.of(["q0"]), "siso", None),
        ]
        for model, secrets, variant, k in cases:
            verdict = check_strong_opacity(model, OpacityQuery(variant, secrets, k))
            assert not verdict.holds
            ok, why = validate_witness(
                model,
                DefinitionalClaim(variant, verdict.witness, secrets=secrets, k=k),
            )
            assert ok, f"{variant}: {why}"

    def test_fabricated_opacity_witness_rejected(self, s2):
        # claims CSO leaks after observing "a", but {q0} is not secret-only
        fake = OpacityWitness("cso", ("a",))
        ok, why = validate_witness(
            s2, DefinitionalClaim("cso", fake, secrets=SecretSpec.of(["q1"]))
        )
        assert not ok

    def test_unknown_symbol_is_malformed(self, s2):
        fake = OpacityWitness("cso", ("z",))
        with pytest.raises(MalformedClaimError):
            validate_witness(
                s2, DefinitionalClaim("cso", fake, secrets=SecretSpec.of(["q1"]))
            )


class TestBoundedSearch:
    def test_s2_star_counterexample(self, s2):
        found = bounded_definitional_search(s2, "star-sd", bound=6)
        assert found is not None
        assert found["observation"] == ["a", "b"]
        assert found["pump_length"] == 1

    def test_s4_star_no_counterexample(self, s4):
        # every observation is short; no pumpable ambiguity exists
        assert bounded_definitional_search(s4, "star-sd", bound=10) is None

    def test_s1_detectable_no_counterexample(self, s1):
        for prop in ("star-sd", "omega-sd"):
            assert bounded_definitional_search(s1, prop, bound=8) is None

    def test_s3_diag_counterexample(self, s3, s3_faults):
        found = bounded_definitional_search(s3, "diag", faults=s3_faults, bound=10)
        assert found is not None
        assert "f" in found["run"]

    def test_s7_diag_no_counterexample(self, s7):
        found = bounded_definitional_search(
            s7, "diag", faults=FaultSpec.of(["f"]), bound=10
        )
        assert found is None

    def test_s3_pred_counterexample(self, s3, s3_faults):
        found = bounded_definitional_search(s3, "pred", faults=s3_faults, bound=10)
        assert found is not None
        assert found["run"][-1] == "f"

    def test_s5_infso_no_counterexample(self, s5, s5_secrets):
        found = bounded_definitional_search(
            s5, "infso", secrets=s5_secrets, bound=6
        )
        assert found is None

    def test_s5_sinfso_counterexample(self, s5, s5_secrets):
        found = bounded_definitional_search(
            s5, "sinfso", secrets=s5_secrets, bound=6
        )
        assert found is not None

    def test_single_state_model_clean(self):
        model = validate(
            states=["q0"], events=["e"], labels={"e": "a"},
            transitions=[("q0", "e", "q0")], initial=["q0"],
        )
        for prop in ("star-sd", "omega-sd"):
            assert bounded_definitional_search(model, prop, bound=5) is None
        assert (
            bounded_definitional_search(
                model, "cso", secrets=SecretSpec.of([]), bound=5
            )
            is None
        )

    def test_budget_guard(self, s2):
        with pytest.raises(BudgetExceededError):
            bounded_definitional_search(s2, "star-sd", bound=6, budget=3)

    def test_bad_bound_rejected(self, s2):
        with pytest.raises(ValueError):
            bounded_definitional_search(s2, "star-sd", bound=0)


class TestGenerator:
    def test_determinism(self):
        params = GeneratorParams(states=4, events=3, seed=7)
        a_model, a_faults, a_secrets = random_lfsa(params)
        b_model, b_faults, b_secrets = random_lfsa(params)
        assert a_model.states == b_model.states
        assert a_model.transitions == b_model.transitions
        assert a_faults == b_faults and a_secrets == b_secrets

    def test_liveness_flag(self):
        from desv.automaton import is_live

        for seed in range(10):
            model, _f, _s = random_lfsa(
                GeneratorParams(states=5, events=4, live=True, seed=seed)
            )
            assert is_live(model)

    def test_divergence_free_flag(self):
        from desv.automaton import is_divergence_free

        for seed in range(10):
            model, _f, _s = random_lfsa(
                GeneratorParams(
                    states=5, events=4, divergence_free=True, seed=seed
                )
            )
            assert is_divergence_free(model)

    def test_degenerate_rejected(self):
        with pytest.raises(GeneratorError):
            random_lfsa(GeneratorParams(states=0))

    def test_seeds_vary_models(self):
        models = {
            random_lfsa(GeneratorParams(states=4, events=3, seed=seed))[0].transitions
            for seed in range(8)
        }
        assert len(models) > 1


class TestGeneratorSerialization:
    def test_byte_identical_documents(self):
        from desv.modeldoc import serialize_model

        params = GeneratorParams(states=5, events=4, seed=21, live=True)
        first = serialize_model(*random_lfsa(params))
        second = serialize_model(*random_lfsa(params))
        assert first == second
