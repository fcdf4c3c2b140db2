"""Scale ladders: level builders, the merge step, the separation cascade,
margin measurement, and verification."""

import dataclasses
import math

import numpy as np
import pytest

from conetrees import (
    ColoredCovering,
    Family,
    FiniteMetricSpace,
    LadderConstructionError,
    SeparationPreconditionError,
    ast_shrink,
    build_base,
    build_level,
    margin_trace,
    separate,
    separation_margins,
    standing_assumptions,
    verify_base,
    verify_char_seq,
)
from conetrees.harness import generate


def line_space(n=41, spacing=1.0):
    coords = np.arange(n) * spacing
    d = np.abs(coords[:, None] - coords[None, :]).astype(float)
    return FiniteMetricSpace(d, tuple(f"x{i}" for i in range(n)))


class TestMarginTrace:
    def test_literal_values(self):
        tr = margin_trace(0.1, 0.6, 3)
        assert tr[3] == pytest.approx(0.3)
        assert tr[2] == pytest.approx(0.3 - 2 * 0.1)
        assert tr[1] == pytest.approx(0.3 - 2 * (0.1 + 0.01))

    def test_lower_bound_under_assumptions(self):
        # whenever 2r/(1-r) <= delta/4 every traced margin stays >= delta/4
        for r in (0.01, 0.03, 0.05):
            for delta in (0.4, 0.6, 2 / 3):
                if 2 * r / (1 - r) > delta / 4:
                    continue
                tr = margin_trace(r, delta, 6)
                assert min(tr.values()) >= delta / 4 - 1e-12

    def test_can_go_negative_without_assumptions(self):
        tr = margin_trace(0.4, 0.2, 4)
        assert min(tr.values()) < 0


class TestStandingAssumptions:
    def test_flagship_violations(self):
        v = standing_assumptions(0.125, 0.19635, 0.19635)
        assert len(v) == 2

    def test_satisfied_for_small_r(self):
        assert standing_assumptions(0.01, 0.6, 0.1) == []


class TestAstShrink:
    def test_erodes_and_absorbs(self):
        sp = line_space(41)
        u = sp.subset(range(10, 31))
        fam = Family(sp, (u,))
        ghat = Family(sp, tuple(sp.subset([i]) for i in range(12, 29, 2)))
        out = ast_shrink(fam, ghat, s=1.0, delta=0.5)
        assert len(out.members) == 1
        assert set(out.members[0].indices) == set(range(14, 27))

    def test_output_inside_input(self):
        sp = line_space(41)
        u = sp.subset(range(5, 30))
        fam = Family(sp, (u,))
        ghat = Family(sp, tuple(sp.subset([i]) for i in range(0, 41, 3)))
        out = ast_shrink(fam, ghat, s=1.0, delta=0.5)
        for v in out.members:
            assert v.indices <= u.indices

    def test_dichotomy(self):
        sp = line_space(41)
        fam = Family(sp, (sp.subset(range(10, 31)),))
        ghat = Family(sp, tuple(sp.subset([i]) for i in range(0, 41, 2)))
        s, delta = 1.0, 0.5
        out = ast_shrink(fam, ghat, s, delta)
        star = out.members[0]
        for w in ghat:
            ball = w.neighborhood(delta * s)
            inside = ball.indices <= star.indices
            disjoint = not (ball.indices & star.indices)
            assert inside or disjoint

    def test_eroded_away_member_dropped(self):
        sp = line_space(41)
        fam = Family(sp, (sp.subset([5]), sp.subset(range(10, 31))))
        ghat = Family(sp, (sp.subset([20]),))
        out = ast_shrink(fam, ghat, s=1.0, delta=0.5)
        assert len(out.members) == 1

    def test_whole_space_member_survives(self):
        sp = FiniteMetricSpace(np.zeros((1, 1)), ("o",))
        fam = Family(sp, (sp.whole(),))
        ghat = Family(sp, (sp.whole(),))
        out = ast_shrink(fam, ghat, s=1.0, delta=0.5)
        assert out.members[0].is_whole

    def test_rejects_bad_delta(self):
        sp = line_space(5)
        fam = Family(sp, (sp.whole(),))
        with pytest.raises(SeparationPreconditionError, match="delta"):
            ast_shrink(fam, fam, s=1.0, delta=0.8)

    def test_rejects_coarse_fine_family(self):
        sp = line_space(41)
        fam = Family(sp, (sp.whole(),))
        ghat = Family(sp, (sp.subset(range(10)),))
        with pytest.raises(SeparationPreconditionError, match="mesh"):
            ast_shrink(fam, ghat, s=1.0, delta=0.5)

    def test_rejects_crowded_fine_family(self):
        sp = line_space(41)
        fam = Family(sp, (sp.whole(),))
        ghat = Family(sp, (sp.subset([0]), sp.subset([2])))
        with pytest.raises(SeparationPreconditionError, match="disjoint"):
            ast_shrink(fam, ghat, s=4.0, delta=0.5)


class TestBuildLevel:
    def test_whole_space_regime(self):
        sp = generate("circle", n=16)
        cov = build_level(sp, scale=10.0, m=2)
        assert all(len(c.members) == 1 for c in cov.colors)
        assert cov.colors[0].members[0].is_whole

    def test_singleton_regime(self):
        sp = generate("circle", n=16)
        cov = build_level(sp, scale=0.1, m=2)
        assert cov.mesh == 0.0
        assert all(len(c.members) == 16 for c in cov.colors)

    def test_window_regime(self):
        sp = generate("circle", n=16)
        cov = build_level(sp, scale=3.0, m=2)
        assert 0.0 < cov.mesh <= 3.0
        assert cov.pooled.covers()
        assert cov.lebesgue() > 0.0

    def test_mesh_never_exceeds_scale(self):
        for kind, params in [("circle", {"n": 50}), ("interval", {"n": 50}),
                             ("cantor", {"depth": 4})]:
            sp = generate(kind, **params)
            for scale in (0.6, 0.3, 0.08):
                cov = build_level(sp, scale=scale * sp.diameter, m=2)
                assert cov.mesh <= scale * sp.diameter * (1 + 1e-9)

    def test_greedy_depth_guarantee(self):
        sp = generate("random_circle", n=120, seed=5)
        scale = 0.5
        cov = build_level(sp, scale=scale, m=2, strategy="generic_greedy",
                          allow_more_colors=True)
        assert cov.lebesgue() >= 0.24 * scale

    def test_greedy_color_demand_is_reported(self):
        sp = generate("interval", n=200)
        with pytest.raises(LadderConstructionError, match="colors"):
            build_level(sp, scale=0.125, m=2, strategy="generic_greedy")


class TestBuildBase:
    def test_flagship_constants(self):
        sp = generate("circle", n=512)
        base = build_base(sp, r=0.125, depth=4, colors=2)
        gap = 2 * math.pi / 512
        assert base.delta == pytest.approx(2 * gap / 0.125)
        assert base.lam == pytest.approx(2 * gap / 0.125)
        assert verify_base(base).passed

    def test_delta_target_gate(self):
        sp = generate("circle", n=64)
        with pytest.raises(LadderConstructionError, match="below target"):
            build_base(sp, r=0.125, depth=2, colors=2, delta_target=0.9)

    def test_depth_one(self):
        sp = generate("circle", n=32)
        base = build_base(sp, r=0.25, depth=1, colors=2)
        assert base.depth == 1
        assert verify_base(base).passed


class TestSeparate:
    def test_identity_cascade_on_sparse_circle(self):
        sp = generate("circle", n=512)
        base = build_base(sp, r=0.125, depth=4, colors=2)
        seq = separate(base)
        assert all(rec["identity"] for rec in seq.provenance["cascade"])
        assert seq.provenance["dropped_members"] == 0
        assert seq.delta == pytest.approx(base.delta)
        assert seq.gamma == pytest.approx(4 * (2 * math.pi / 512) / 0.125)
        assert verify_char_seq(seq).passed

    def test_real_cascade_on_greedy_ladder(self):
        sp = generate("interval", n=400)
        base = build_base(sp, r=0.125, depth=2, colors=5,
                          strategy="generic_greedy", allow_more_colors=True)
        seq = separate(base)
        worked = [rec for rec in seq.provenance["cascade"]
                  if not rec["identity"]]
        assert worked, "cascade should have had a non-trivial stage"
        assert all(rec["ghat_disjoint"] for rec in worked)
        for rec in worked:
            assert rec["moat"] <= 4 * (0.125 ** rec["stage"] / 2) + 1e-15
        assert seq.provenance["dropped_members"] == 0
        assert seq.gamma > 0.1
        assert verify_char_seq(seq).passed

    def test_depth_one_passthrough(self):
        sp = generate("circle", n=64)
        base = build_base(sp, r=0.125, depth=1, colors=2)
        seq = separate(base)
        assert seq.provenance["cascade"] == []
        for a in range(2):
            got = [m.indices for m in seq.level(1).colors[a].members]
            want = [m.indices for m in base.level(1).colors[a].members]
            assert got == want
        assert seq.gamma > 0.0

    def test_enforce_assumptions_raises_on_flagship(self):
        sp = generate("circle", n=512)
        base = build_base(sp, r=0.125, depth=2, colors=2)
        with pytest.raises(SeparationPreconditionError, match="standing"):
            separate(base, enforce_assumptions=True)

    def test_warnings_recorded_by_default(self):
        sp = generate("circle", n=128)
        base = build_base(sp, r=0.125, depth=2, colors=2)
        seq = separate(base)
        assert len(seq.provenance["assumption_warnings"]) >= 1


class TestSeparationMargins:
    def test_two_block_line(self):
        sp = line_space(21, spacing=0.5)
        blocks = ColoredCovering(sp, (
            Family(sp, (sp.subset(range(11)), sp.subset(range(11, 21)))),
            Family(sp, (sp.whole(),)),
        ))
        singles = ColoredCovering(sp, (
            Family(sp, tuple(sp.subset([i]) for i in range(21))),
            Family(sp, tuple(sp.subset([i]) for i in range(21))),
        ))
        gamma, records = separation_margins(sp, (blocks, singles), r=0.5)
        # binding pair: the two level-1 blocks at distance 0.5, over r^1
        assert gamma == pytest.approx(1.0)
        assert all(rec["pair_margin"] >= 0.5 for rec in records
                   if rec["fine"] == rec["coarse"] == 1)

    def test_overlapping_same_color_has_zero_margin(self):
        sp = line_space(21, spacing=0.5)
        cov = ColoredCovering(sp, (
            Family(sp, (sp.subset(range(12)), sp.subset(range(9, 21)))),
        ))
        gamma, _ = separation_margins(sp, (cov,), r=0.5)
        assert gamma == 0.0


class TestVerification:
    def test_planted_mesh_violation_detected(self):
        sp = generate("circle", n=64)
        base = build_base(sp, r=0.125, depth=2, colors=2)
        seq = separate(base)
        fat = Family(sp, tuple(seq.level(2).colors[0].members)
                     + (sp.subset(range(32)),))
        bad_level = ColoredCovering(sp, (fat,) + seq.level(2).colors[1:])
        tampered = dataclasses.replace(
            seq, levels=(seq.levels[0], bad_level))
        rep = verify_char_seq(tampered)
        assert not rep.passed
        assert any("mesh" in f.name for f in rep.failures)

    def test_report_summary_lines(self):
        sp = generate("circle", n=64)
        base = build_base(sp, r=0.125, depth=2, colors=2)
        rep = verify_base(base)
        assert rep.passed
        text = rep.summary()
        assert "[PASS]" in text and "[FAIL]" not in text
