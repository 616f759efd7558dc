"""Decision procedures for structural precongruence and network
equivalence."""

from chorkit import (
    GlobalState,
    behaviour_equiv,
    canonical,
    chor_equiv,
    epp_sync,
    network_equiv,
    parse_choreography,
    parse_network,
    pn,
    precongruent,
    render_choreography,
)


def chor(text):
    return parse_choreography(text)


def beh(text):
    return parse_network(f"z[0]{{ {text} }}").as_dict()["z"].behaviour


class TestChoreographyEquivalence:
    def test_disjoint_actions_commute(self):
        assert chor_equiv(chor("p.1 -> q; r.2 -> s; 0"),
                          chor("r.2 -> s; p.1 -> q; 0")) is True

    def test_shared_name_blocks_the_swap(self):
        assert chor_equiv(chor("p.1 -> q; q.2 -> r; 0"),
                          chor("q.2 -> r; p.1 -> q; 0")) is False

    def test_common_branch_head_hoists(self):
        a = chor("if p.true then { q.1 -> r; p.2 -> q; 0 }"
                 " else { q.1 -> r; p.3 -> q; 0 }")
        b = chor("q.1 -> r; "
                 "if p.true then { p.2 -> q; 0 } else { p.3 -> q; 0 }")
        assert chor_equiv(a, b) is True

    def test_garbage_collection_is_free(self):
        assert chor_equiv(chor("def X = { p.1 -> q; X } in 0"),
                          chor("0")) is True

    def test_unfolding_needs_budget(self):
        a = chor("def X = { p.1 -> q; X } in X")
        b = chor("def X = { p.1 -> q; X } in p.1 -> q; X")
        assert precongruent(a, b, unfold_budget=0) is None  # unknown
        assert precongruent(a, b, unfold_budget=1) is True

    def test_canonical_is_idempotent_and_sorts(self):
        c = chor("r.2 -> s; p.1 -> q; 0")
        k = canonical(c)
        assert canonical(k) == k
        assert render_choreography(k) == "p.1 -> q; r.2 -> s; 0"


class TestBehaviourEquivalence:
    def test_unfold_budget(self):
        a = beh("def X = { q!1; X } in X")
        b = beh("def X = { q!1; X } in q!1; X")
        assert behaviour_equiv(a, b, unfold_budget=0) is None
        assert behaviour_equiv(a, b, unfold_budget=1) is True

    def test_plainly_different(self):
        assert behaviour_equiv(beh("q!1; 0"), beh("q!2; 0")) is False


class TestNetworkEquivalence:
    def test_done_processes_are_invisible(self):
        a = parse_network("p[0]{ 0 } | q[1]{ r!1; 0 } | r[0]{ q?; 0 }")
        b = parse_network("q[1]{ r!1; 0 } | r[0]{ q?; 0 }")
        assert network_equiv(a, b) is True

    def test_states_matter(self):
        a = parse_network("p[0]{ q!1; 0 } | q[0]{ p?; 0 }")
        b = parse_network("p[1]{ q!1; 0 } | q[0]{ p?; 0 }")
        assert network_equiv(a, b) is False

    def test_queues_matter(self):
        a = parse_network("p[0]<(q, 1)>{ q?; 0 }")
        b = parse_network("p[0]{ q?; 0 }")
        assert network_equiv(a, b) is False

    def test_queue_congruence_is_free(self):
        a = parse_network("p[0]<(q, 1), (r, 2)>{ q?; r?; 0 }")
        b = parse_network("p[0]<(r, 2), (q, 1)>{ q?; r?; 0 }")
        assert network_equiv(a, b) is True

    def test_projection_of_equivalent_choreographies_equivalent(self):
        a = chor("p.1 -> q; r.2 -> s; 0")
        b = chor("r.2 -> s; p.1 -> q; 0")
        sigma = GlobalState.uniform(sorted(pn(a)))
        assert network_equiv(epp_sync(a, sigma), epp_sync(b, sigma)) is True
