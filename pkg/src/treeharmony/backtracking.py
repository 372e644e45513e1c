"""Probabilistic backtracking search for harmonious labellings.

Nodes are labelled in level-sequence order, which guarantees each node's
parent is already labelled, so every assignment fixes exactly one edge
label.  A label is valid for the current node when the partial labelling
on non-root nodes stays injective and the fixed edge labels stay
pairwise distinct; always assigning valid labels therefore yields a
harmonious labelling on completion.  The root is labelled uniformly at
random and never revisited: shifting all labels by a constant preserves
harmoniousness, so alternatives at the root add nothing.

Three randomized escapes from bad regions, all bounded:

* a limit on backtrack events per run (the expensive phenomenon),
* random restarts (fresh root label and candidate orders),
* stochastic perturbation: occasionally the remaining-candidate lists of
  two pending depths are each reshuffled by one random transposition.

The duplicated label of every returned labelling sits on the root: the
root's value is the one value non-root nodes may still take.
"""

from .config import SolveOutcome, SolverConfig
from .labelling import is_harmonious
from .trees import Tree


class BacktrackState:
    """Search position: next depth to label, partial labels, membership
    structures for used node labels and edge sums, per-depth candidate
    stacks, and the backtrack counter."""

    __slots__ = ("tree", "n", "m", "labels", "depth", "used_node_labels",
                 "used_edge_labels", "choice_stack", "backtracks")

    def __init__(self, tree: Tree, root_label: int):
        self.tree = tree
        self.n = tree.n
        self.m = tree.n - 1
        self.labels = [-1] * tree.n
        self.labels[0] = root_label
        self.depth = 1
        self.used_node_labels = [False] * self.m
        self.used_edge_labels = [False] * self.m
        self.choice_stack: list = [None] * tree.n
        self.backtracks = 0

    def assign(self, node: int, value: int) -> None:
        self.labels[node] = value
        self.used_node_labels[value] = True
        s = (value + self.labels[self.tree.parents[node]]) % self.m
        self.used_edge_labels[s] = True

    def unassign(self, node: int) -> None:
        value = self.labels[node]
        self.labels[node] = -1
        self.used_node_labels[value] = False
        s = (value + self.labels[self.tree.parents[node]]) % self.m
        self.used_edge_labels[s] = False


def valid_labels(state: BacktrackState, node: int) -> set[int]:
    """Values that keep the non-root labels injective and the fixed edge
    labels distinct, given the assignment below *node*."""
    parent_label = state.labels[state.tree.parents[node]]
    m = state.m
    used_v = state.used_node_labels
    used_s = state.used_edge_labels
    return {v for v in range(m)
            if not used_v[v] and not used_s[(v + parent_label) % m]}


def _perturb(state: BacktrackState, rng) -> None:
    # Swap two random candidates within each of (up to) two random
    # pending depths.  Reordering within a depth is always sound: a
    # depth's candidates were validated against the assignment below it,
    # which has not changed.
    pending = [d for d in range(1, state.depth + 1)
               if state.choice_stack[d] and len(state.choice_stack[d]) >= 2]
    if not pending:
        return
    count = min(2, len(pending))
    for d in rng.sample(pending, count):
        stack = state.choice_stack[d]
        i = rng.randrange(len(stack))
        j = rng.randrange(len(stack))
        stack[i], stack[j] = stack[j], stack[i]


def _run_once(tree: Tree, cfg: SolverConfig, rng) -> tuple[tuple[int, ...] | None, int]:
    """One bounded run; returns (labels or None, backtracks used)."""
    n = tree.n
    if n == 1:
        return (0,), 0
    state = BacktrackState(tree, rng.randrange(n - 1))
    candidates = sorted(valid_labels(state, 1))
    rng.shuffle(candidates)
    state.choice_stack[1] = candidates
    while True:
        stack = state.choice_stack[state.depth]
        if not stack:
            if state.backtracks >= cfg.backtrack_limit:
                return None, state.backtracks
            state.backtracks += 1
            state.choice_stack[state.depth] = None
            state.depth -= 1
            if state.depth == 0:
                # Root alternatives are shift-equivalent; the run's
                # search space is exhausted.
                return None, state.backtracks
            state.unassign(state.depth)
            continue
        state.assign(state.depth, stack.pop())
        if state.depth == n - 1:
            return tuple(state.labels), state.backtracks
        state.depth += 1
        candidates = sorted(valid_labels(state, state.depth))
        rng.shuffle(candidates)
        state.choice_stack[state.depth] = candidates
        if cfg.perturb_rate > 0 and rng.random() < cfg.perturb_rate:
            _perturb(state, rng)


def solve_backtracking(tree: Tree, cfg: SolverConfig, rng) -> SolveOutcome:
    """Backtracking with restarts; failure (a value, not an error) after
    every restart exhausts its backtrack limit."""
    total_backtracks = 0
    for restart in range(cfg.backtrack_restarts):
        labels, used = _run_once(tree, cfg, rng)
        total_backtracks += used
        if labels is not None:
            assert is_harmonious(tree, labels), "backtracking produced a bad labelling"
            return SolveOutcome(True, labels, "backtrack", {
                "backtracks": total_backtracks,
                "restarts_used": restart + 1,
            })
    return SolveOutcome(False, None, "backtrack", {
        "backtracks": total_backtracks,
        "restarts_used": cfg.backtrack_restarts,
    })
