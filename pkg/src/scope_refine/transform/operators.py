"""The 15 semantic-preserving rewrite operators.

Each operator declares its applicable sites on a scope-resolved unit and a
rewrite applied to a deep copy. Contract for every operator: wherever a site
is reported, the rewritten program is interpreter-equivalent to the original
(same value or same fault kind, with 2x fuel slack for added bookkeeping
steps) and the canonical print differs.

Reordering operators (RelationalMirror, CommutativeSwap, IndependentStmtSwap)
additionally require the touched expressions/statements to be statically
well-typed: with TypeFault ruled out, the only data-dependent fault left in a
side-effect-free operand is DivByZero, so permuting evaluation order cannot
change the surfaced fault kind.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable

from ..errors import SemanticError
from ..minic import nodes as n
from ..minic.parser import parse  # noqa: F401  (re-exported for tests)
from ..minic.printer import wrap_left, wrap_operand, wrap_right
from ..minic.scopes import SymbolTable, resolve_scopes


class OperatorId(IntEnum):
    VAR_RENAME = 1
    FOR_TO_WHILE = 2
    WHILE_TO_FOR = 3
    COMPOUND_ASSIGN_EXPAND = 4
    INC_DEC_EXPAND = 5
    IF_BRANCH_SWAP = 6
    RELATIONAL_MIRROR = 7
    COMMUTATIVE_SWAP = 8
    DECL_SPLIT = 9
    DEAD_STORE_INSERT = 10
    PAREN_WRAP = 11
    TERNARY_TO_IF = 12
    SWITCH_TO_IF_CHAIN = 13
    BOOL_COND_NORMALIZE = 14
    INDEPENDENT_STMT_SWAP = 15


ALL_OPERATORS = tuple(OperatorId)


@dataclass(frozen=True)
class Site:
    node_id: int
    payload: object | None = None


@dataclass(frozen=True)
class Applied:
    unit: n.SourceUnit
    site: Site


@dataclass(frozen=True)
class Inapplicable:
    reason: str


TransformOutcome = Applied | Inapplicable


# --- shared helpers --------------------------------------------------------


def _has_side_effects(expr: n.Expr) -> bool:
    """True if evaluating the expression can write state or call a function."""
    for node in n.iter_nodes(expr):
        if isinstance(node, n.Call):
            return True
        if isinstance(node, n.Unary) and node.op in ("++", "--"):
            return True
    return False


def _expr_clean(expr: n.Expr, table: SymbolTable) -> bool:
    return table.expr_types.get(expr.node_id) is not None


def _contains_kind(root: n.Node, kinds: tuple) -> bool:
    return any(isinstance(node, kinds) for node in n.iter_nodes(root))


def _continue_binds_here(body: n.Block) -> bool:
    """A Continue in `body` that is not inside a nested loop binds to the
    loop owning `body` (continues pass through switch)."""

    def walk(node: n.Node) -> bool:
        for child in n.child_nodes(node):
            if isinstance(child, (n.While, n.For)):
                continue  # inner loop captures its own continues
            if isinstance(child, n.Continue):
                return True
            if walk(child):
                return True
        return False

    return walk(body)


def _breaks_binding_to_switch(stmts: list[n.Stmt]) -> list[n.Break]:
    """Break statements in `stmts` that would bind to the owning switch
    (not captured by a nested loop or switch)."""
    found: list[n.Break] = []

    def walk(node: n.Node):
        for child in n.child_nodes(node):
            if isinstance(child, (n.While, n.For, n.Switch)):
                continue
            if isinstance(child, n.Break):
                found.append(child)
            else:
                walk(child)

    for s in stmts:
        if isinstance(s, n.Break):
            found.append(s)
        elif not isinstance(s, (n.While, n.For, n.Switch)):
            walk(s)
    return found


def _all_names(unit: n.SourceUnit) -> set[str]:
    names = set()
    for node in n.iter_nodes(unit):
        name = getattr(node, "name", None)
        if name is not None:
            names.add(name)
    return names


def _fresh_name(prefix: str, seed: int, taken: set[str]) -> str:
    salt = 0
    while True:
        digest = hashlib.blake2b(f"{seed}:{salt}".encode(), digest_size=4).hexdigest()
        name = f"{prefix}{digest}"
        if name not in taken:
            return name
        salt += 1


def _stmt_lists(unit: n.SourceUnit):
    """All statement-list slots: (owner node, list) for blocks, case bodies
    and switch defaults, in preorder."""
    for node in n.iter_nodes(unit):
        if isinstance(node, n.Block):
            yield node, node.stmts
        elif isinstance(node, n.Case):
            yield node, node.stmts
        elif isinstance(node, n.Switch) and node.default is not None:
            yield node, node.default


def _function_of(unit: n.SourceUnit, node_id: int) -> n.FunctionDef | None:
    for fn in unit.functions:
        for node in n.iter_nodes(fn):
            if node.node_id == node_id:
                return fn
    return None


# --- operator: sites + rewrite ---------------------------------------------
# Rewrites mutate a deep copy of the unit; `table` was resolved against the
# original but node ids match, so its id-keyed maps remain valid.


def _sites_var_rename(unit, table):
    sites = []
    for node in n.iter_nodes(unit):
        if isinstance(node, (n.Declarator, n.Param)):
            sites.append(Site(node.node_id))
    return sites


def _apply_var_rename(unit, target, pmap, table, seed):
    fn = _function_of(unit, target.node_id)
    fresh = _fresh_name("v_", seed, _all_names(unit) | set(table.functions))
    target.name = fresh
    for node in n.iter_nodes(fn):
        if isinstance(node, n.Var):
            binding = table.binding.get(node.node_id)
            if binding is not None and binding.decl_id == target.node_id:
                node.name = fresh


def _sites_for_to_while(unit, table):
    sites = []
    for node in n.iter_nodes(unit):
        if not isinstance(node, n.For) or _continue_binds_here(node.body):
            continue
        if node.step is not None:
            # the step moves into the body scope; a top-level body decl of a
            # name the step touches would capture it
            shadowed = {d.name for s in node.body.stmts if isinstance(s, n.Decl)
                        for d in s.declarators}
            step_names = table.reads[node.step.node_id] | table.writes[node.step.node_id]
            if shadowed & step_names:
                continue
        sites.append(Site(node.node_id))
    return sites


def _apply_for_to_while(unit, target, pmap, table, seed):
    cond = target.cond if target.cond is not None else n.BoolLit(True)
    inner = list(target.body.stmts)
    if target.step is not None:
        inner.append(target.step)
    loop = n.While(cond, n.Block(inner))
    stmts = [target.init] if target.init is not None else []
    stmts.append(loop)
    _replace(pmap, target, n.Block(stmts))


def _sites_while_to_for(unit, table):
    return [Site(node.node_id) for node in n.iter_nodes(unit) if isinstance(node, n.While)]


def _apply_while_to_for(unit, target, pmap, table, seed):
    _replace(pmap, target, n.For(None, target.cond, None, target.body))


def _sites_compound_expand(unit, table):
    return [Site(node.node_id) for node in n.iter_nodes(unit)
            if isinstance(node, n.CompoundAssign)]


def _apply_compound_expand(unit, target, pmap, table, seed):
    op = target.op[0]
    value = n.Binary(op, n.Var(target.target.name), wrap_right(target.value, op))
    _replace(pmap, target, n.Assign(n.Var(target.target.name), value))


def _sites_incdec_expand(unit, table):
    # statement-position only; expression-position inc/dec is a Unary node
    return [Site(node.node_id) for node in n.iter_nodes(unit) if isinstance(node, n.IncDec)]


def _apply_incdec_expand(unit, target, pmap, table, seed):
    op = "+" if target.op == "++" else "-"
    value = n.Binary(op, n.Var(target.target.name), n.IntLit(1))
    _replace(pmap, target, n.Assign(n.Var(target.target.name), value))


def _sites_if_branch_swap(unit, table):
    return [Site(node.node_id) for node in n.iter_nodes(unit) if isinstance(node, n.If)]


def _apply_if_branch_swap(unit, target, pmap, table, seed):
    negated = n.Unary("!", wrap_operand(target.cond))
    if target.else_branch is None:
        new_then: n.Block = n.Block([])
    elif isinstance(target.else_branch, n.If):  # else-if chain becomes a block
        new_then = n.Block([target.else_branch])
    else:
        new_then = target.else_branch
    _replace(pmap, target, n.If(negated, new_then, target.then_branch))


_MIRROR = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


def _sites_relational_mirror(unit, table):
    sites = []
    for node in n.iter_nodes(unit):
        if (isinstance(node, n.Binary) and node.op in _MIRROR
                and not _has_side_effects(node.left)
                and not _has_side_effects(node.right)
                and _expr_clean(node, table)):
            sites.append(Site(node.node_id))
    return sites


def _apply_relational_mirror(unit, target, pmap, table, seed):
    op = _MIRROR[target.op]
    _replace(pmap, target,
             n.Binary(op, wrap_left(target.right, op), wrap_right(target.left, op)))


_COMMUTATIVE = ("+", "*", "==")


def _sites_commutative_swap(unit, table):
    sites = []
    for node in n.iter_nodes(unit):
        if (isinstance(node, n.Binary) and node.op in _COMMUTATIVE
                and not _has_side_effects(node.left)
                and not _has_side_effects(node.right)
                and _expr_clean(node, table)):
            sites.append(Site(node.node_id))
    return sites


def _apply_commutative_swap(unit, target, pmap, table, seed):
    _replace(pmap, target,
             n.Binary(target.op, wrap_left(target.right, target.op),
                      wrap_right(target.left, target.op)))


def _sites_decl_split(unit, table):
    listed = set()
    for _, stmts in _stmt_lists(unit):
        for s in stmts:
            listed.add(s.node_id)
    return [Site(node.node_id) for node in n.iter_nodes(unit)
            if isinstance(node, n.Decl) and len(node.declarators) >= 2
            and node.node_id in listed]


def _apply_decl_split(unit, target, pmap, table, seed):
    parts = [n.Decl(target.var_type, [d]) for d in target.declarators]
    _replace_in_list(pmap, target, parts)


def _sites_dead_store(unit, table):
    sites = []
    for _, stmts in _stmt_lists(unit):
        for s in stmts:
            sites.append(Site(s.node_id))
    sites.sort(key=lambda s: s.node_id)
    return sites


def _apply_dead_store(unit, target, pmap, table, seed):
    fresh = _fresh_name("_ds_", seed, _all_names(unit) | set(table.functions))
    store = n.Decl(n.INT, [n.Declarator(fresh, n.IntLit(0))])
    parent, fname, index = pmap[target.node_id]
    getattr(parent, fname).insert(index, store)


def _sites_paren_wrap(unit, table):
    return [Site(node.node_id) for node in n.iter_nodes(unit) if isinstance(node, n.Binary)]


def _apply_paren_wrap(unit, target, pmap, table, seed):
    _replace(pmap, target, n.Paren(target))


def _sites_ternary_to_if(unit, table):
    listed = set()
    for _, stmts in _stmt_lists(unit):
        for s in stmts:
            listed.add(s.node_id)
    sites = []
    for node in n.iter_nodes(unit):
        if (isinstance(node, n.Assign) and isinstance(node.value, n.Ternary)
                and node.node_id in listed
                and not _has_side_effects(node.value.cond)):
            sites.append(Site(node.node_id))
    return sites


def _apply_ternary_to_if(unit, target, pmap, table, seed):
    tern = target.value
    name = target.target.name
    then_branch = n.Block([n.Assign(n.Var(name), tern.if_true)])
    else_branch = n.Block([n.Assign(n.Var(name), tern.if_false)])
    _replace(pmap, target, n.If(tern.cond, then_branch, else_branch))


def _case_ok_for_chain(stmts: list[n.Stmt]) -> bool:
    if not stmts or not isinstance(stmts[-1], (n.Break, n.Return)):
        return False
    # a non-final break bound to this switch would retarget in the chain
    if len(_breaks_binding_to_switch(stmts)) != (1 if isinstance(stmts[-1], n.Break) else 0):
        return False
    # top-level declarations are scoped to the whole switch body; sibling
    # arms of the chain would lose them
    return not any(isinstance(s, n.Decl) for s in stmts)


def _sites_switch_to_if_chain(unit, table):
    sites = []
    for node in n.iter_nodes(unit):
        if not isinstance(node, n.Switch) or not (1 <= len(node.cases) <= 3):
            continue
        # the chain re-evaluates the scrutinee per comparison; keep that
        # within the oracle's fuel slack by requiring a trivial scrutinee
        if sum(1 for _ in n.iter_nodes(node.scrutinee)) > 3:
            continue
        if _has_side_effects(node.scrutinee) or not _expr_clean(node.scrutinee, table):
            continue
        arms = [case.stmts for case in node.cases]
        if node.default is not None:
            arms.append(node.default)
        if all(_case_ok_for_chain(stmts) for stmts in arms):
            sites.append(Site(node.node_id))
    return sites


def _strip_trailing_break(stmts: list[n.Stmt]) -> list[n.Stmt]:
    return stmts[:-1] if isinstance(stmts[-1], n.Break) else list(stmts)


def _label_expr(label: int) -> n.Expr:
    return n.IntLit(label) if label >= 0 else n.Unary("-", n.IntLit(-label))


def _apply_switch_to_if_chain(unit, target, pmap, table, seed):
    tail: n.Block | n.If | None = None
    if target.default is not None:
        tail = n.Block(_strip_trailing_break(target.default))
    chain: n.If | None = None
    for case in reversed(target.cases):
        cond = n.Binary("==", wrap_left(n.clone(target.scrutinee), "=="),
                        wrap_right(_label_expr(case.label), "=="))
        arm = n.Block(_strip_trailing_break(case.stmts))
        chain = n.If(cond, arm, tail)
        tail = chain  # earlier cases chain through 'else if'
    _replace(pmap, target, chain)


def _sites_bool_cond_normalize(unit, table):
    sites = []
    for node in n.iter_nodes(unit):
        if isinstance(node, (n.If, n.While, n.Ternary)):
            sites.append(Site(node.node_id))
        elif isinstance(node, n.For) and node.cond is not None:
            sites.append(Site(node.node_id))
    return sites


def _apply_bool_cond_normalize(unit, target, pmap, table, seed):
    target.cond = n.Binary("==", wrap_left(target.cond, "=="), n.BoolLit(True))


def _sites_independent_stmt_swap(unit, table):
    banned = (n.Call, n.Return, n.Break, n.Continue, n.While, n.For)
    sites = []
    for _, stmts in _stmt_lists(unit):
        for a, b in zip(stmts, stmts[1:]):
            if _contains_kind(a, banned) or _contains_kind(b, banned):
                continue
            if not (table.stmt_clean.get(a.node_id) and table.stmt_clean.get(b.node_id)):
                continue
            ra, wa = table.reads[a.node_id], table.writes[a.node_id]
            rb, wb = table.reads[b.node_id], table.writes[b.node_id]
            if (wa & wb) or (wa & rb) or (ra & wb):
                continue
            sites.append(Site(a.node_id))
    sites.sort(key=lambda s: s.node_id)
    return sites


def _apply_independent_stmt_swap(unit, target, pmap, table, seed):
    parent, fname, index = pmap[target.node_id]
    stmts = getattr(parent, fname)
    stmts[index], stmts[index + 1] = stmts[index + 1], stmts[index]


# --- slot editing ----------------------------------------------------------


def _replace(pmap, old: n.Node, new: n.Node):
    parent, fname, index = pmap[old.node_id]
    if index is None:
        setattr(parent, fname, new)
    else:
        getattr(parent, fname)[index] = new


def _replace_in_list(pmap, old: n.Node, new_items: list[n.Node]):
    parent, fname, index = pmap[old.node_id]
    lst = getattr(parent, fname)
    lst[index:index + 1] = new_items


# --- registry and public operations ----------------------------------------

_SiteFn = Callable[[n.SourceUnit, SymbolTable], list[Site]]

_SITE_FNS: dict[OperatorId, _SiteFn] = {
    OperatorId.VAR_RENAME: _sites_var_rename,
    OperatorId.FOR_TO_WHILE: _sites_for_to_while,
    OperatorId.WHILE_TO_FOR: _sites_while_to_for,
    OperatorId.COMPOUND_ASSIGN_EXPAND: _sites_compound_expand,
    OperatorId.INC_DEC_EXPAND: _sites_incdec_expand,
    OperatorId.IF_BRANCH_SWAP: _sites_if_branch_swap,
    OperatorId.RELATIONAL_MIRROR: _sites_relational_mirror,
    OperatorId.COMMUTATIVE_SWAP: _sites_commutative_swap,
    OperatorId.DECL_SPLIT: _sites_decl_split,
    OperatorId.DEAD_STORE_INSERT: _sites_dead_store,
    OperatorId.PAREN_WRAP: _sites_paren_wrap,
    OperatorId.TERNARY_TO_IF: _sites_ternary_to_if,
    OperatorId.SWITCH_TO_IF_CHAIN: _sites_switch_to_if_chain,
    OperatorId.BOOL_COND_NORMALIZE: _sites_bool_cond_normalize,
    OperatorId.INDEPENDENT_STMT_SWAP: _sites_independent_stmt_swap,
}

_APPLY_FNS = {
    OperatorId.VAR_RENAME: _apply_var_rename,
    OperatorId.FOR_TO_WHILE: _apply_for_to_while,
    OperatorId.WHILE_TO_FOR: _apply_while_to_for,
    OperatorId.COMPOUND_ASSIGN_EXPAND: _apply_compound_expand,
    OperatorId.INC_DEC_EXPAND: _apply_incdec_expand,
    OperatorId.IF_BRANCH_SWAP: _apply_if_branch_swap,
    OperatorId.RELATIONAL_MIRROR: _apply_relational_mirror,
    OperatorId.COMMUTATIVE_SWAP: _apply_commutative_swap,
    OperatorId.DECL_SPLIT: _apply_decl_split,
    OperatorId.DEAD_STORE_INSERT: _apply_dead_store,
    OperatorId.PAREN_WRAP: _apply_paren_wrap,
    OperatorId.TERNARY_TO_IF: _apply_ternary_to_if,
    OperatorId.SWITCH_TO_IF_CHAIN: _apply_switch_to_if_chain,
    OperatorId.BOOL_COND_NORMALIZE: _apply_bool_cond_normalize,
    OperatorId.INDEPENDENT_STMT_SWAP: _apply_independent_stmt_swap,
}


def applicable_sites(unit: n.SourceUnit, op: OperatorId,
                     table: SymbolTable | None = None) -> list[Site]:
    """Sites where `op` applies, in node-id order. Every returned site
    satisfies the operator's precondition."""
    if table is None:
        table = resolve_scopes(unit)
    return _SITE_FNS[OperatorId(op)](unit, table)


def all_applicable_sites(unit: n.SourceUnit) -> dict[OperatorId, list[Site]]:
    """Site lists for every operator, resolving scopes once."""
    table = resolve_scopes(unit)
    return {op: _SITE_FNS[op](unit, table) for op in ALL_OPERATORS}


def apply_op(unit: n.SourceUnit, op: OperatorId, site: Site, seed: int = 0,
             table: SymbolTable | None = None) -> TransformOutcome:
    """Apply one operator at `site`. A site not currently applicable yields
    Inapplicable, never an exception. The input unit is not modified."""
    op = OperatorId(op)
    try:
        if table is None:
            table = resolve_scopes(unit)
    except SemanticError as e:
        return Inapplicable(f"scope resolution failed: {e}")
    sites = _SITE_FNS[op](unit, table)
    if site.node_id not in {s.node_id for s in sites}:
        return Inapplicable(f"node {site.node_id} is not an applicable site for {op.name}")

    new_unit = n.clone(unit)
    target = n.find_node(new_unit, site.node_id)
    pmap = n.parent_map(new_unit)
    _APPLY_FNS[op](new_unit, target, pmap, table, seed)
    n.renumber(new_unit)
    return Applied(new_unit, site)
