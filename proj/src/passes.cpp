// passes.cpp - Value-preserving rewrite passes and per-equation planning

#include "zero2hero/passes.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <utility>

namespace z2h {

namespace {

// ============================================================================
// Small tree utilities
// ============================================================================

bool is_identifier(const ExprPtr& e) {
    return e && (std::holds_alternative<Symbol>(e->node) || std::holds_alternative<Greek>(e->node));
}

bool is_implicit(const ExprPtr& e) {
    const auto* b = e ? std::get_if<BinOp>(&e->node) : nullptr;
    return b && b->op == BinKind::ImplicitMul;
}

void flatten_implicit(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (is_implicit(e)) {
        const auto& b = std::get<BinOp>(e->node);
        flatten_implicit(b.lhs, out);
        out.push_back(b.rhs);
    } else {
        out.push_back(e);
    }
}

ExprPtr chain_implicit(const std::vector<ExprPtr>& factors) {
    ExprPtr acc = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i)
        acc = make_binop(BinKind::ImplicitMul, acc, factors[i]);
    return acc;
}

// Prepends a factor to e's juxtaposition chain, keeping left association so
// the result re-parses to itself.
ExprPtr mul_prefix(const ExprPtr& factor, const ExprPtr& e) {
    std::vector<ExprPtr> fs;
    fs.push_back(factor);
    flatten_implicit(e, fs);
    return chain_implicit(fs);
}

bool is_plus_mark(const ExprPtr& e) {
    const auto* m = e ? std::get_if<Mark>(&e->node) : nullptr;
    return m && m->kind == MarkKind::Punct && m->text == "+";
}

// A continuation row's leading "+" parses as the first factor of the row's
// juxtaposition chain.  Passes must never see it: prefixing a factor in
// front of it would turn display punctuation into a binary plus.  It is
// peeled off here and re-attached after the whole plan has run.
std::pair<ExprPtr, ExprPtr> peel_leading_plus(const ExprPtr& e) {
    if (!is_implicit(e)) return {nullptr, e};
    std::vector<ExprPtr> fs;
    flatten_implicit(e, fs);
    if (fs.size() < 2 || !is_plus_mark(fs.front())) return {nullptr, e};
    return {fs.front(), chain_implicit({fs.begin() + 1, fs.end()})};
}

// A chunk consisting only of display marks (a lone trailing comma cell) has
// no value to preserve and nothing worth wrapping.
bool pure_display(const ExprPtr& e) {
    if (!e) return true;
    if (std::holds_alternative<Mark>(e->node)) return true;
    if (is_implicit(e)) {
        const auto& b = std::get<BinOp>(e->node);
        return pure_display(b.lhs) && pure_display(b.rhs);
    }
    return false;
}

bool substantive(const ExprPtr& e) { return e && !pure_display(e); }

// ============================================================================
// Free-occurrence machinery for the renaming pass
// ============================================================================

// Collects the renameable victims: free atoms of the Symbol variant (Greek
// atoms are already Greek, and names that exist only inside Opaque bytes
// have no tree atom to rewrite).  The traversal and the binding rules
// mirror free_symbols exactly, so "free" never disagrees between the two.
void collect_candidates(const ExprPtr& e, std::vector<std::string>& bound,
                        std::map<std::string, ExprPtr>& out) {
    if (!e) return;
    if (is_identifier(e)) {
        if (!std::holds_alternative<Symbol>(e->node)) return;
        std::string key = atom_key(e);
        if (std::find(bound.begin(), bound.end(), key) == bound.end()) out.emplace(std::move(key), e);
        return;
    }
    const ExprNode& node = e->node;
    if (const auto* x = std::get_if<BigOp>(&node)) {
        collect_candidates(x->lower, bound, out);
        collect_candidates(x->upper, bound, out);
        std::size_t pushed = 0;
        if (is_identifier(x->bound_var)) {
            bound.push_back(atom_key(x->bound_var));
            ++pushed;
        }
        if (is_identifier(x->differential)) {
            bound.push_back(atom_key(x->differential));
            ++pushed;
        }
        collect_candidates(x->body, bound, out);
        while (pushed--) bound.pop_back();
        return;
    }
    if (const auto* x = std::get_if<Function>(&node)) {
        collect_candidates(x->head, bound, out);
        collect_candidates(x->power, bound, out);
        for (const auto& a : x->args) collect_candidates(a, bound, out);
        return;
    }
    if (const auto* x = std::get_if<Partial>(&node)) {
        collect_candidates(x->wrt, bound, out);
        collect_candidates(x->operand, bound, out);
        return;
    }
    if (const auto* x = std::get_if<Neg>(&node)) return collect_candidates(x->operand, bound, out);
    if (const auto* x = std::get_if<BinOp>(&node)) {
        collect_candidates(x->lhs, bound, out);
        collect_candidates(x->rhs, bound, out);
        return;
    }
    if (const auto* x = std::get_if<Fraction>(&node)) {
        collect_candidates(x->num, bound, out);
        collect_candidates(x->den, bound, out);
        return;
    }
    if (const auto* x = std::get_if<Group>(&node)) return collect_candidates(x->inner, bound, out);
    if (const auto* x = std::get_if<Relation>(&node)) {
        for (const auto& o : x->operands) collect_candidates(o, bound, out);
        return;
    }
    if (const auto* x = std::get_if<Rows>(&node)) {
        for (const auto& row : x->rows)
            for (const auto& c : row.chunks) collect_candidates(c, bound, out);
        return;
    }
}

// Replaces every free occurrence of the atom spelled `key` by `repl`,
// honoring the same binding rules as collect_candidates.  Binder atoms
// themselves (bound_var, differential) are binding sites, not occurrences,
// and stay untouched; the replacement is always fresh, so capture is
// impossible.
ExprPtr rename_free(const ExprPtr& e, const std::string& key, const ExprPtr& repl,
                    std::vector<std::string>& bound) {
    if (!e) return nullptr;
    if (is_identifier(e)) {
        if (atom_key(e) == key && std::find(bound.begin(), bound.end(), key) == bound.end())
            return repl;
        return e;
    }
    const ExprNode& node = e->node;
    if (const auto* x = std::get_if<Neg>(&node)) return make_neg(rename_free(x->operand, key, repl, bound));
    if (const auto* x = std::get_if<BinOp>(&node))
        return make_binop(x->op, rename_free(x->lhs, key, repl, bound),
                          rename_free(x->rhs, key, repl, bound));
    if (const auto* x = std::get_if<Fraction>(&node))
        return make_fraction(rename_free(x->num, key, repl, bound),
                             rename_free(x->den, key, repl, bound));
    if (const auto* x = std::get_if<Function>(&node)) {
        std::vector<ExprPtr> args;
        args.reserve(x->args.size());
        for (const auto& a : x->args) args.push_back(rename_free(a, key, repl, bound));
        return make_expr(Function{x->cmd, rename_free(x->head, key, repl, bound),
                                  rename_free(x->power, key, repl, bound), std::move(args)});
    }
    if (const auto* x = std::get_if<BigOp>(&node)) {
        ExprPtr lower = rename_free(x->lower, key, repl, bound);
        ExprPtr upper = rename_free(x->upper, key, repl, bound);
        std::size_t pushed = 0;
        if (is_identifier(x->bound_var)) {
            bound.push_back(atom_key(x->bound_var));
            ++pushed;
        }
        if (is_identifier(x->differential)) {
            bound.push_back(atom_key(x->differential));
            ++pushed;
        }
        ExprPtr body = rename_free(x->body, key, repl, bound);
        while (pushed--) bound.pop_back();
        return make_bigop(x->kind, x->bound_var, lower, upper, body, x->differential);
    }
    if (const auto* x = std::get_if<Partial>(&node))
        return make_partial(x->order, rename_free(x->wrt, key, repl, bound),
                            rename_free(x->operand, key, repl, bound));
    if (const auto* x = std::get_if<Group>(&node))
        return make_group(x->bracket, rename_free(x->inner, key, repl, bound));
    if (const auto* x = std::get_if<Relation>(&node)) {
        Relation rel;
        rel.ops = x->ops;
        rel.operands.reserve(x->operands.size());
        for (const auto& o : x->operands) rel.operands.push_back(rename_free(o, key, repl, bound));
        return make_expr(std::move(rel));
    }
    if (const auto* x = std::get_if<Rows>(&node)) {
        Rows rows;
        rows.env = x->env;
        rows.rows.reserve(x->rows.size());
        for (const auto& row : x->rows) {
            Row nr;
            nr.chunks.reserve(row.chunks.size());
            for (const auto& c : row.chunks) nr.chunks.push_back(rename_free(c, key, repl, bound));
            rows.rows.push_back(std::move(nr));
        }
        return make_expr(std::move(rows));
    }
    return e;  // Number, Constant, Opaque, Mark
}

// ============================================================================
// Pass implementations
// ============================================================================

bool applicable_always(const ExprPtr& e) { return substantive(e); }

bool applicable_rename(const ExprPtr& e) {
    if (!substantive(e)) return false;
    std::map<std::string, ExprPtr> cands;
    std::vector<std::string> bound;
    collect_candidates(e, bound, cands);
    return !cands.empty();
}

RewriteResult apply_unit_sum(const ExprPtr& e, Rng&, FreshSymbolSource& fresh) {
    ExprPtr k = fresh.fresh("kappa");
    return {make_bigop(BigOpKind::Sum, k, make_number("1"), make_number("1"), e), std::nullopt};
}

RewriteResult apply_unit_prod(const ExprPtr& e, Rng&, FreshSymbolSource& fresh) {
    ExprPtr x = fresh.fresh("xi");
    return {make_bigop(BigOpKind::Prod, x, make_number("1"), make_number("1"), e), std::nullopt};
}

RewriteResult apply_planck(const ExprPtr& e, Rng&, FreshSymbolSource&) {
    ExprPtr num = make_binop(BinKind::ImplicitMul,
                             make_binop(BinKind::ImplicitMul, make_number("2"),
                                        make_constant(ConstKind::Pi)),
                             make_constant(ConstKind::HBar));
    ExprPtr one = make_fraction(num, make_constant(ConstKind::PlanckH));
    return {mul_prefix(one, e), std::nullopt};
}

RewriteResult apply_log_exp(const ExprPtr& e, Rng&, FreshSymbolSource&) {
    return {make_function("ln", {make_function("exp", {e})}), std::nullopt};
}

RewriteResult apply_trig_one(const ExprPtr& e, Rng&, FreshSymbolSource& fresh) {
    ExprPtr phi = fresh.fresh("varphi");
    ExprPtr s = make_function("sin", {phi}, make_number("2"));
    ExprPtr c = make_function("cos", {phi}, make_number("2"));
    ExprPtr one = make_group(BracketKind::Paren, make_binop(BinKind::Add, s, c));
    return {mul_prefix(one, e), std::nullopt};
}

RewriteResult apply_unit_integral(const ExprPtr& e, Rng&, FreshSymbolSource& fresh) {
    ExprPtr tau = fresh.fresh("tau");
    return {make_bigop(BigOpKind::Integral, nullptr, make_number("0"), make_number("1"), e, tau),
            std::nullopt};
}

RewriteResult apply_zero_add(const ExprPtr& e, Rng& rng, FreshSymbolSource& fresh) {
    const std::uint64_t which = rng.below(3);
    ExprPtr dom = fresh.fresh("Omega");
    ExprPtr var = fresh.fresh("theta");
    ExprPtr body;
    switch (which) {
        case 0: body = make_partial(1, var, var); break;
        case 1: body = make_binop(BinKind::Pow, var, make_number("2")); break;
        default: body = make_fraction(make_function("sin", {var}), make_number("2")); break;
    }
    ExprPtr decoy = make_bigop(BigOpKind::ContourIntegral, nullptr, dom, nullptr, body, var);
    ExprPtr zero = make_binop(BinKind::Mul, make_number("0"), decoy);
    return {make_binop(BinKind::Add, e, zero), std::nullopt};
}

RewriteResult apply_greek_rename(const ExprPtr& e, Rng& rng, FreshSymbolSource& fresh) {
    std::map<std::string, ExprPtr> cands;
    std::vector<std::string> bound;
    collect_candidates(e, bound, cands);
    auto it = std::next(cands.begin(),
                        static_cast<std::ptrdiff_t>(rng.below(static_cast<std::uint64_t>(cands.size()))));
    const std::string old_key = it->first;
    const auto& victim = std::get<Symbol>(it->second->node);
    ExprPtr repl = fresh.fresh_like("psi", victim.sub, victim.accent, victim.style);
    ExprPtr renamed = rename_free(e, old_key, repl, bound);
    Renaming sigma;
    sigma.emplace(old_key, atom_key(repl));
    return {std::move(renamed), std::move(sigma)};
}

}  // namespace

// ============================================================================
// Fresh symbol source
// ============================================================================

FreshSymbolSource::FreshSymbolSource(const std::vector<std::string>& forbidden_keys)
    : used_(forbidden_keys.begin(), forbidden_keys.end()) {}

ExprPtr FreshSymbolSource::claim(std::string_view preferred, const ExprPtr& sub,
                                 const std::optional<AccentKind>& accent,
                                 const std::optional<std::string>& style) {
    auto attempt = [this, &sub, &accent, &style](std::string_view base) -> ExprPtr {
        ExprPtr atom = make_greek(std::string(base), sub, accent, style);
        if (used_.insert(atom_key(atom)).second) return atom;
        return nullptr;
    };
    if (ExprPtr a = attempt(preferred)) return a;
    for (std::string_view base : greek_command_names())
        if (ExprPtr a = attempt(base)) return a;
    // Every decorated Greek spelling is taken (adversarial input): fall back
    // to numerically subscripted bare Greek, dropping the decoration.
    for (int n = 2;; ++n) {
        ExprPtr atom = make_greek(std::string(preferred), make_number(std::to_string(n)));
        if (used_.insert(atom_key(atom)).second) return atom;
    }
}

ExprPtr FreshSymbolSource::fresh(std::string_view preferred) {
    return claim(preferred, nullptr, std::nullopt, std::nullopt);
}

ExprPtr FreshSymbolSource::fresh_like(std::string_view preferred, const ExprPtr& sub,
                                      const std::optional<AccentKind>& accent,
                                      const std::optional<std::string>& style) {
    return claim(preferred, sub, accent, style);
}

// ============================================================================
// Pass catalog
// ============================================================================

const std::vector<TransformPass>& pass_catalog() {
    static const std::vector<TransformPass> table = {
        {"unit-sum", SemanticsClass::ExactIdentity, applicable_always, apply_unit_sum},
        {"unit-prod", SemanticsClass::ExactIdentity, applicable_always, apply_unit_prod},
        {"planck", SemanticsClass::ExactIdentity, applicable_always, apply_planck},
        {"log-exp", SemanticsClass::ExactIdentity, applicable_always, apply_log_exp},
        {"trig-one", SemanticsClass::ExactIdentity, applicable_always, apply_trig_one},
        {"unit-integral", SemanticsClass::ExactIdentity, applicable_always, apply_unit_integral},
        {"zero-add", SemanticsClass::ExactIdentity, applicable_always, apply_zero_add},
        {"greek-rename", SemanticsClass::Renaming, applicable_rename, apply_greek_rename},
    };
    return table;
}

const TransformPass* find_pass(std::string_view id) {
    for (const auto& p : pass_catalog())
        if (p.id == id) return &p;
    return nullptr;
}

bool is_valid_pass_id(std::string_view id) { return find_pass(id) != nullptr; }

// ============================================================================
// Equation decomposition
// ============================================================================

namespace {

// Applies fn to every rewritable leaf in a fixed traversal order: relation
// operands, per-row per-chunk payloads (chunks that are relations split
// further), or the whole expression.  Null slots are preserved untouched.
ExprPtr map_leaves(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn) {
    if (!e) return nullptr;
    if (const auto* x = std::get_if<Rows>(&e->node)) {
        Rows out;
        out.env = x->env;
        out.rows.reserve(x->rows.size());
        for (const auto& row : x->rows) {
            Row nr;
            nr.chunks.reserve(row.chunks.size());
            for (const auto& c : row.chunks) {
                if (!c) {
                    nr.chunks.push_back(nullptr);
                    continue;
                }
                if (const auto* rel = std::get_if<Relation>(&c->node)) {
                    Relation nrel;
                    nrel.ops = rel->ops;
                    nrel.operands.reserve(rel->operands.size());
                    for (const auto& o : rel->operands) nrel.operands.push_back(o ? fn(o) : nullptr);
                    nr.chunks.push_back(make_expr(std::move(nrel)));
                } else {
                    nr.chunks.push_back(fn(c));
                }
            }
            out.rows.push_back(std::move(nr));
        }
        return make_expr(std::move(out));
    }
    if (const auto* x = std::get_if<Relation>(&e->node)) {
        Relation nrel;
        nrel.ops = x->ops;
        nrel.operands.reserve(x->operands.size());
        for (const auto& o : x->operands) nrel.operands.push_back(o ? fn(o) : nullptr);
        return make_expr(std::move(nrel));
    }
    return fn(e);
}

}  // namespace

std::vector<ExprPtr> equation_leaves(const ExprPtr& e) {
    std::vector<ExprPtr> out;
    map_leaves(e, [&out](const ExprPtr& leaf) {
        out.push_back(leaf);
        return leaf;
    });
    return out;
}

// ============================================================================
// Planning and application
// ============================================================================

Renaming compose(const Renaming& first, const Renaming& second) {
    Renaming out;
    std::set<std::string> consumed;
    for (const auto& [from, mid] : first) {
        auto it = second.find(mid);
        if (it != second.end()) {
            out.emplace(from, it->second);
            consumed.insert(it->first);
        } else {
            out.emplace(from, mid);
        }
    }
    for (const auto& [from, to] : second)
        if (!consumed.count(from)) out.emplace(from, to);
    return out;
}

namespace {

struct LeafState {
    ExprPtr mark;     // leading continuation plus, or null
    ExprPtr payload;  // canonical payload the passes rewrite
    Renaming sigma;   // composed renaming for this leaf
};

ExprPtr reattach(const LeafState& s) {
    if (!s.mark) return s.payload;
    return canonical(make_binop(BinKind::ImplicitMul, s.mark, s.payload));
}

ExprPtr rebuild_equation(const ExprPtr& original, const std::vector<LeafState>& st) {
    std::size_t cur = 0;
    return map_leaves(original, [&](const ExprPtr&) { return reattach(st[cur++]); });
}

// One plan step applied to every applicable leaf.  Each (step, leaf) cell
// draws from its own RNG stream, so results do not depend on how equations
// or leaves are scheduled.
void apply_step_to_leaves(const TransformPass& pass, std::vector<LeafState>& st,
                          std::uint64_t seed, std::size_t index, int step,
                          FreshSymbolSource& fresh) {
    for (std::size_t li = 0; li < st.size(); ++li) {
        LeafState& s = st[li];
        if (!pass.applicable(s.payload)) continue;
        Rng r = Rng::stream(seed, kStreamApply, static_cast<std::uint64_t>(index),
                            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(step)) << 32) |
                                static_cast<std::uint64_t>(static_cast<std::uint32_t>(li)));
        RewriteResult res = pass.apply(s.payload, r, fresh);
        s.payload = canonical(res.expr);
        if (res.renaming) s.sigma = compose(s.sigma, *res.renaming);
    }
}

EquationRewrite run_plan(const ExprPtr& e, std::uint64_t seed, std::size_t index, int intensity,
                         const std::vector<std::string>& allowed,
                         const std::vector<std::string>* fixed_plan) {
    EquationRewrite out;
    out.original = canonical(e);

    std::vector<ExprPtr> before = equation_leaves(out.original);
    std::vector<LeafState> st;
    st.reserve(before.size());
    for (const auto& leaf : before) {
        auto [mark, payload] = peel_leading_plus(leaf);
        st.push_back({mark, payload, Renaming{}});
    }

    // One fresh scope per equation: every introduced name avoids everything
    // the whole equation mentions, and rows share bound names only by
    // deliberate reuse of the same fresh atom, never by accident.
    FreshSymbolSource fresh(all_names(out.original));
    out.step_totals.push_back(score(out.original).total);

    std::vector<const TransformPass*> pool;
    for (const auto& p : pass_catalog()) {
        if (allowed.empty() || std::find(allowed.begin(), allowed.end(), p.id) != allowed.end())
            pool.push_back(&p);
    }

    Rng plan_rng = Rng::stream(seed, kStreamPlan, static_cast<std::uint64_t>(index));
    const TransformPass* last = nullptr;
    ExprPtr current = out.original;
    const int steps = fixed_plan ? static_cast<int>(fixed_plan->size()) : intensity;
    for (int step = 0; step < steps; ++step) {
        const TransformPass* pick = nullptr;
        if (fixed_plan) {
            pick = find_pass((*fixed_plan)[static_cast<std::size_t>(step)]);
            if (!pick) continue;  // unknown id: precondition violated, skip
            bool any = false;
            for (const auto& s : st) any = any || pick->applicable(s.payload);
            if (!any) continue;
        } else {
            std::vector<const TransformPass*> avail;
            for (const auto* p : pool) {
                for (const auto& s : st) {
                    if (p->applicable(s.payload)) {
                        avail.push_back(p);
                        break;
                    }
                }
            }
            if (avail.empty()) break;
            std::vector<const TransformPass*> pick_from;
            for (const auto* p : avail)
                if (p != last) pick_from.push_back(p);
            if (pick_from.empty()) pick_from = avail;  // single-pass allow-list
            pick = pick_from[plan_rng.below(pick_from.size())];
        }
        apply_step_to_leaves(*pick, st, seed, index, step, fresh);
        out.plan.push_back(std::string(pick->id));
        last = pick;
        current = rebuild_equation(out.original, st);
        out.step_totals.push_back(score(current).total);
    }
    out.transformed = current;

    std::vector<ExprPtr> after = equation_leaves(out.transformed);
    out.leaves.reserve(before.size());
    for (std::size_t i = 0; i < before.size(); ++i)
        out.leaves.push_back({before[i], after[i], st[i].sigma});
    return out;
}

}  // namespace

EquationRewrite transform_equation(const ExprPtr& e, std::uint64_t seed, std::size_t index,
                                   int intensity, const std::vector<std::string>& allowed) {
    return run_plan(e, seed, index, intensity, allowed, nullptr);
}

EquationRewrite apply_plan(const ExprPtr& e, const std::vector<std::string>& plan,
                           std::uint64_t seed, std::size_t index) {
    return run_plan(e, seed, index, static_cast<int>(plan.size()), {}, &plan);
}

}  // namespace z2h
