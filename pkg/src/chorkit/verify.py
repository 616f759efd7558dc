"""Bounded exhaustive checking of the calculus's metatheory, plus the
seeded program-corpus generator.

Every check explores configuration graphs breadth-first up to a depth and a
hard state cap; exceeding the cap reports budget-exceeded, never a silent
pass.  Counterexamples carry enough rendered context to replay through the
public step engines.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .chor_async import check_abstract_async, enabled_async, well_formed
from .congruence import network_equiv
from .errors import IllFormed, NotProjectable
from .network import classify, enabled_asp, enabled_sp, lift_to_async, \
    network_key, normalize_network
from .project import epp_async, epp_sync, projectable
from .render import render_choreography
from .sync import Configuration, enabled_sync, terminated
from .terms import BinOp, BoolV, Cell, Com, Cond, Def, IntV, Lit, NIL, \
    Call, Nil, pn
from .values import GlobalState

STATE_CAP = 50_000
SOUNDNESS_UNFOLD_BUDGET = 2


@dataclass(frozen=True)
class TheoremReport:
    theorem: str
    program: str
    states: int
    verdict: str  # pass | fail | budget-exceeded
    counterexample: tuple = ()

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


# ---------------------------------------------------------------------------
# Corpus generation


@dataclass(frozen=True)
class CorpusSpec:
    max_procs: int = 4
    max_actions: int = 8
    recursion_depth: int = 1
    conditionals: bool = True
    seed: int = 42
    count: int = 60


_NAMES = ("p", "q", "r", "s")


def _random_expr(rng):
    roll = rng.random()
    if roll < 0.6:
        return Lit(IntV(rng.randrange(10)))
    if roll < 0.8:
        return Cell()
    return BinOp("+", Cell(), Lit(IntV(rng.randrange(5))))


def _random_guard(rng, small=10):
    roll = rng.random()
    if roll < 0.4:
        return Lit(BoolV(rng.random() < 0.5))
    op = "<" if roll < 0.7 else "="
    return BinOp(op, Cell(), Lit(IntV(rng.randrange(small))))


def _random_seq(rng, names, budget, allow_cond, rec_var=None):
    """Random action sequence; conditionals keep non-decider behaviour
    identical in both branches, so the result is projectable."""
    if budget <= 0:
        return Call(rec_var) if rec_var and rng.random() < 0.8 else NIL
    if allow_cond and budget >= 2 and rng.random() < 0.25:
        decider = rng.choice(names)
        inner = budget - 1
        shared = _random_seq(rng, names, inner - 1, allow_cond, rec_var)
        then, orelse = shared, shared
        # Branches may differ only in what the decider itself sends.
        if len(names) > 1 and rng.random() < 0.7:
            other = rng.choice([n for n in names if n != decider])
            then = Com(decider, _random_expr(rng), other, shared)
            orelse = Com(decider, _random_expr(rng), other, shared)
        return Cond(decider, _random_guard(rng), then, orelse)
    src = rng.choice(names)
    dst = rng.choice([n for n in names if n != src])
    return Com(src, _random_expr(rng), dst,
               _random_seq(rng, names, budget - 1, allow_cond, rec_var))


def _random_program(rng, spec: CorpusSpec):
    nprocs = rng.randrange(2, spec.max_procs + 1)
    names = list(_NAMES[:nprocs])
    actions = rng.randrange(1, spec.max_actions + 1)
    if spec.recursion_depth > 0 and rng.random() < 0.2:
        # A branch-free loop: without process-to-process selections, a loop
        # whose branches differ is never projectable, so recursive programs
        # here run forever and are explored up to the depth bound.
        body_budget = max(1, min(3, actions // 2))
        body = NIL
        while isinstance(body, Nil):
            body = _random_seq(rng, names, body_budget, False)
        from .terms import chor_seq
        loop = Def("X", chor_seq(body, Call("X")), Call("X"))
        prefix = _random_seq(rng, names, actions - body_budget,
                             spec.conditionals)
        return chor_seq(prefix, loop) if rng.random() < 0.5 else loop
    return _random_seq(rng, names, actions, spec.conditionals)


def generate_corpus(spec: CorpusSpec):
    """Deterministic list of runtime-free projectable choreographies."""
    rng = random.Random(spec.seed)
    out = []
    attempts = 0
    while len(out) < spec.count and attempts < spec.count * 50:
        attempts += 1
        program = _random_program(rng, spec)
        if isinstance(program, type(NIL)) or not pn(program):
            continue
        if projectable(program):
            out.append(program)
    return out


def default_state(program) -> GlobalState:
    return GlobalState.uniform(sorted(pn(program)))


# ---------------------------------------------------------------------------
# Exploration


def explore_chor(cfg: Configuration, mode: str, depth: int,
                 cap: int = STATE_CAP):
    """Unique reachable configurations up to the depth; returns
    (configs, capped flag)."""
    step = enabled_sync if mode == "sync" else enabled_async
    seen = {cfg.key(): cfg}
    frontier = [cfg]
    for _ in range(depth):
        nxt = []
        for c in frontier:
            for _, succ in step(c):
                k = succ.key()
                if k not in seen:
                    if len(seen) >= cap:
                        return list(seen.values()), True
                    seen[k] = succ
                    nxt.append(succ)
        if not nxt:
            break
        frontier = nxt
    return list(seen.values()), False


def explore_network(n, mode: str, depth: int, cap: int = STATE_CAP):
    step = enabled_sp if mode == "sync" else enabled_asp
    n = normalize_network(n)
    seen = {network_key(n): n}
    frontier = [n]
    for _ in range(depth):
        nxt = []
        for m in frontier:
            for _, succ in step(m):
                k = network_key(succ)
                if k not in seen:
                    if len(seen) >= cap:
                        return list(seen.values()), True
                    seen[k] = succ
                    nxt.append(succ)
        if not nxt:
            break
        frontier = nxt
    return list(seen.values()), False


def _report(theorem, program, states, failures, capped=False):
    if failures:
        return TheoremReport(theorem, program, states, "fail",
                             tuple(failures[:5]))
    if capped:
        return TheoremReport(theorem, program, states, "budget-exceeded")
    return TheoremReport(theorem, program, states, "pass")


def _sig(label):
    return (label.rule, label.subjects, label.value)


# ---------------------------------------------------------------------------
# Theorem checks


def check_deadlock_freedom(program, sigma, depth, mode) -> TheoremReport:
    """Progress: every reachable configuration is terminated or can step;
    for projectable programs, the projected network likewise never gets
    stuck or strands messages."""
    name = f"deadlock-freedom[{mode}]"
    text = render_choreography(program)
    step = enabled_sync if mode == "sync" else enabled_async
    configs, capped = explore_chor(Configuration(program, sigma), mode, depth)
    failures = []
    for cfg in configs:
        if not step(cfg) and not terminated(cfg.chor):
            failures.append(f"stuck configuration: {cfg.key()[0]}")
    states = len(configs)
    if projectable(program):
        net = epp_sync(program, sigma)
        if mode == "async":
            net = lift_to_async(net)
        nets, ncapped = explore_network(net, mode, depth)
        capped = capped or ncapped
        states += len(nets)
        for n in nets:
            verdict = classify(n, mode)
            if verdict in ("deadlocked", "orphaned-messages"):
                failures.append(f"{verdict} network: {network_key(n)}")
    return _report(name, text, states, failures, capped)


def _lockstep(cfg, chor_steps, net, net_steps, project, failures):
    """Signature bijection plus pointwise successor correspondence."""
    chor_by_sig = {}
    for label, succ in chor_steps:
        chor_by_sig.setdefault(_sig(label), []).append(succ)
    net_by_sig = {}
    for label, succ in net_steps:
        net_by_sig.setdefault(_sig(label), []).append(succ)
    here = cfg.key()[0]
    if set(chor_by_sig) != set(net_by_sig):
        only_c = set(chor_by_sig) - set(net_by_sig)
        only_n = set(net_by_sig) - set(chor_by_sig)
        failures.append(
            f"step mismatch at {here}: choreography-only {sorted(only_c)}, "
            f"network-only {sorted(only_n)}")
        return
    for sig, chor_succs in chor_by_sig.items():
        net_succs = net_by_sig[sig]
        if len(chor_succs) != len(net_succs):
            failures.append(f"multiplicity mismatch for {sig} at {here}")
            continue
        for succ in chor_succs:
            projected = project(succ)
            if projected is None:
                failures.append(f"successor of {sig} not projectable "
                                f"at {here}")
                continue
            if not any(network_equiv(projected, n, SOUNDNESS_UNFOLD_BUDGET)
                       for n in net_succs):
                failures.append(
                    f"no network step for {sig} reaches the projection "
                    f"of {succ.key()[0]} (from {here})")


def check_epp_sync(program, sigma, depth) -> TheoremReport:
    text = render_choreography(program)
    configs, capped = explore_chor(Configuration(program, sigma), "sync",
                                   depth)
    failures = []
    for cfg in configs:
        try:
            net = epp_sync(cfg.chor, cfg.state)
        except (NotProjectable, IllFormed) as exc:
            failures.append(f"projection lost along execution: {exc}")
            continue

        def project(succ):
            try:
                return epp_sync(succ.chor, succ.state)
            except (NotProjectable, IllFormed):
                return None

        _lockstep(cfg, enabled_sync(cfg), net, enabled_sp(net), project,
                  failures)
    return _report("epp-sync-lockstep", text, len(configs), failures, capped)


def check_epp_async(program, sigma, depth) -> TheoremReport:
    text = render_choreography(program)
    configs, capped = explore_chor(Configuration(program, sigma), "async",
                                   depth)
    failures = []
    for cfg in configs:
        if not well_formed(cfg.chor)[0]:
            failures.append(f"ill-formed reachable term: {cfg.key()[0]}")
            continue
        try:
            net = epp_async(cfg.chor, cfg.state)
        except (NotProjectable, IllFormed) as exc:
            failures.append(f"projection lost along execution: {exc}")
            continue

        def project(succ):
            try:
                return epp_async(succ.chor, succ.state)
            except (NotProjectable, IllFormed):
                return None

        _lockstep(cfg, enabled_async(cfg), net, enabled_asp(net), project,
                  failures)
    return _report("epp-async-lockstep", text, len(configs), failures,
                   capped)


def check_async_equivalence(program, sigma, depth) -> TheoremReport:
    """Both clauses of asynchronous equivalence: every synchronous step is
    a two-step (send; receive) asynchronous path, and every asynchronous
    run can rejoin a synchronously reachable configuration."""
    text = render_choreography(program)
    start = Configuration(program, sigma)
    # Draining one pending message can take several steps (its receive
    # plus the send/receive pairs of every communication blocking it), so
    # join paths scale with a multiple of the exploration depth, and the
    # synchronous reference set must reach at least as far.  The greedy
    # drain is linear in this budget and synchronous state sets saturate,
    # so a generous bound is cheap.
    join_depth = 10 * depth + 20
    sync_configs, capped1 = explore_chor(start, "sync", depth + join_depth)
    sync_keys = {c.key() for c in sync_configs}
    failures = []
    for cfg in sync_configs:
        for label, succ in enabled_sync(cfg):
            if label.rule in ("Then", "Else"):
                if not any(l.key() == label.key() and s.key() == succ.key()
                           for l, s in enabled_async(cfg)):
                    failures.append(
                        f"conditional step unmatched at {cfg.key()[0]}")
                continue
            matched = False
            for l1, mid in enabled_async(cfg):
                if l1.rule != "ComS" or _sig(l1)[1:] != _sig(label)[1:]:
                    continue
                for l2, end in enabled_async(mid):
                    if l2.rule == "ComR" and _sig(l2)[1:] == _sig(label)[1:] \
                            and end.key() == succ.key():
                        matched = True
                        break
                if matched:
                    break
            if not matched:
                failures.append(
                    f"communication {label.subjects} has no send;receive "
                    f"realization at {cfg.key()[0]}")
    async_configs, capped2 = explore_chor(start, "async", depth)
    budget_hit = False
    for cfg in async_configs:
        if _greedy_join(cfg, sync_keys, join_depth):
            continue
        joined, exhausted = _join_search(cfg, sync_keys, join_depth)
        if not joined:
            if exhausted:
                failures.append(
                    f"async configuration cannot rejoin: {cfg.key()[0]}")
            else:
                budget_hit = True
    report = _report("async-equivalence", text,
                     len(sync_configs) + len(async_configs), failures,
                     capped1 or capped2)
    if report.verdict == "pass" and budget_hit:
        return TheoremReport(report.theorem, report.program, report.states,
                             "budget-exceeded")
    return report


def _greedy_join(cfg, sync_keys, budget) -> bool:
    """Drain pending messages along one deterministic path: receives first,
    then conditionals, then sends.  Usually finds the rejoin without the
    breadth-first fallback."""
    rank = {"ComR": 0, "Then": 1, "Else": 1, "ComS": 2, "Com": 2}
    for _ in range(budget + 1):
        if cfg.key() in sync_keys:
            return True
        options = enabled_async(cfg)
        if not options:
            return False
        _, cfg = min(options,
                     key=lambda s: (rank[s[0].rule], s[0].path, s[0].key()))
    return False


def _join_search(cfg, sync_keys, depth, node_cap: int = 20_000):
    """BFS over async steps for a synchronously reachable configuration.
    Returns (found, search exhausted)."""
    seen = {cfg.key()}
    frontier = [cfg]
    if cfg.key() in sync_keys:
        return True, True
    for _ in range(depth):
        nxt = []
        for c in frontier:
            for _, succ in enabled_async(c):
                k = succ.key()
                if k in sync_keys:
                    return True, True
                if k not in seen:
                    if len(seen) >= node_cap:
                        return False, False
                    seen.add(k)
                    nxt.append(succ)
        if not nxt:
            return False, True
        frontier = nxt
    return False, False


def check_diamond(program, sigma, depth) -> TheoremReport:
    text = render_choreography(program)
    configs, capped = explore_chor(Configuration(program, sigma), "async",
                                   depth)
    failures = []
    for cfg in configs:
        succs = [s for _, s in enabled_async(cfg)]
        uniq = list({s.key(): s for s in succs}.values())
        for i in range(len(uniq)):
            follow_i = {s.key() for _, s in enabled_async(uniq[i])}
            for j in range(i + 1, len(uniq)):
                follow_j = {s.key() for _, s in enabled_async(uniq[j])}
                if not (follow_i & follow_j):
                    failures.append(
                        f"diamond fails at {cfg.key()[0]}: "
                        f"{uniq[i].key()[0]} vs {uniq[j].key()[0]}")
    return _report("diamond", text, len(configs), failures, capped)


def check_sp_asp_simulation(net, depth) -> TheoremReport:
    """Every synchronous network step is simulated from the queue-equipped
    network in at most two steps, landing on the lifted successor."""
    text = network_key(net)
    nets, capped = explore_network(net, "sync", depth)
    failures = []
    for n in nets:
        lifted = lift_to_async(n)
        async_steps = enabled_asp(lifted)
        for label, succ in enabled_sp(n):
            if label.rule in ("Then", "Else"):
                ok = any(_sig(l)[0:2] == _sig(label)[0:2]
                         and network_equiv(s, succ, SOUNDNESS_UNFOLD_BUDGET)
                         for l, s in async_steps)
                if not ok:
                    failures.append(
                        f"conditional step unmatched at {network_key(n)}")
                continue
            matched = False
            for l1, mid in async_steps:
                if l1.rule != "ComS" or _sig(l1)[1:] != _sig(label)[1:]:
                    continue
                for l2, end in enabled_asp(mid):
                    if l2.rule == "ComR" and _sig(l2)[1:] == _sig(label)[1:] \
                            and network_equiv(end, succ,
                                              SOUNDNESS_UNFOLD_BUDGET):
                        matched = True
                        break
                if matched:
                    break
            if not matched:
                failures.append(
                    f"communication {label.subjects} not simulated "
                    f"at {network_key(n)}")
    return _report("sp-asp-simulation", text, len(nets), failures, capped)


def check_well_formedness_preservation(program, sigma, depth) -> TheoremReport:
    text = render_choreography(program)
    configs, capped = explore_chor(Configuration(program, sigma), "async",
                                   depth)
    failures = [f"ill-formed reachable term: {cfg.key()[0]}"
                for cfg in configs if not well_formed(cfg.chor)[0]]
    return _report("well-formedness-preservation", text, len(configs),
                   failures, capped)


def check_abstract_asynchrony(corpus) -> TheoremReport:
    violations = check_abstract_async(corpus, default_state)
    failures = [f"{v.clause} clause fails for {v.process} in {v.context}"
                for v in violations]
    return _report("abstract-asynchrony", f"corpus of {len(corpus)}",
                   sum(len(list(_positions(c))) for c in corpus), failures)


def _positions(c):
    from .chor_async import harvest_contexts

    return harvest_contexts(c)


# ---------------------------------------------------------------------------
# Whole-corpus driver


THEOREMS = ("t1", "t2", "t5", "t6", "t7", "t8", "diamond", "abstract-async")


def verify_corpus(theorems, spec: CorpusSpec, depth: int = 12):
    """Run the selected checks over the generated corpus; reports are
    ordered by program id."""
    corpus = generate_corpus(spec)
    reports = []
    for idx, program in enumerate(corpus):
        sigma = default_state(program)
        pid = f"prog{idx:03d}"
        per = []
        if "t1" in theorems:
            per.append(check_deadlock_freedom(program, sigma, depth, "sync"))
        if "t5" in theorems:
            per.append(check_deadlock_freedom(program, sigma, depth, "async"))
        if "t2" in theorems:
            per.append(check_epp_sync(program, sigma, depth))
        if "t8" in theorems:
            per.append(check_epp_async(program, sigma, depth))
        if "t6" in theorems:
            per.append(check_async_equivalence(program, sigma, depth))
        if "diamond" in theorems:
            per.append(check_diamond(program, sigma, depth))
        if "t7" in theorems:
            net = epp_sync(program, sigma)
            per.append(check_sp_asp_simulation(net, depth))
        if "wf" in theorems or "t8" in theorems:
            per.append(
                check_well_formedness_preservation(program, sigma, depth))
        reports.extend((pid, r) for r in per)
    if "abstract-async" in theorems:
        reports.append(("corpus", check_abstract_asynchrony(corpus)))
    return reports
