// oracle.cpp - numeric evaluation and equivalence certification
//
// Evaluation walks the tree with plain double arithmetic and treats every
// failure as a value: internal control flow uses a Bail exception, but the
// public API converts it to EvalResult before returning.  The rules that
// are not textbook real analysis — the zero left-factor short-circuit, the
// constant-body integral, refusing symbolic bounds — exist specifically to
// make the shipped rewrite passes certifiable; they are documented on the
// declaration and exercised one by one in the tests.

#include "zero2hero/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace z2h {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::e;

// Iteration ceiling for literal-bound sums and products; wider ranges are
// refused as having no practical numeric reading rather than looping for
// minutes on hostile input.
constexpr long long kMaxReductionSpan = 1'000'000;

struct Bail {
    EvalFailure failure;
    std::string detail;
};

[[noreturn]] void bail(EvalFailure f, std::string detail) {
    throw Bail{f, std::move(detail)};
}

double guard(double v) {
    if (!std::isfinite(v)) bail(EvalFailure::DomainError, "non-finite result");
    // A subnormal has already shed mantissa bits, so later steps (ln of an
    // exp near the underflow edge, say) can drift far beyond any tolerance
    // while both sides still "evaluate".  Refuse; the verifier redraws.
    if (std::fpclassify(v) == FP_SUBNORMAL)
        bail(EvalFailure::DomainError, "subnormal result");
    return v;
}

// Exact value of a Number literal, when its text is a plain decimal.
std::optional<double> literal_value(const ExprPtr& e) {
    const auto* n = std::get_if<Number>(&e->node);
    if (!n) return std::nullopt;
    double v = 0.0;
    const char* first = n->text.data();
    const char* last = first + n->text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) return std::nullopt;
    return v;
}

bool is_zero_literal(const ExprPtr& e) {
    auto v = literal_value(e);
    return v.has_value() && *v == 0.0;
}

// Display-only atoms the parser parks inside juxtaposition chains: sized
// delimiters, trailing punctuation, a continuation row's leading plus.  They
// carry no value, so implicit products treat them as transparent.
bool is_display_mark(const ExprPtr& e) {
    return e && std::holds_alternative<Mark>(e->node);
}

std::optional<long long> integer_literal(const ExprPtr& e) {
    auto v = literal_value(e);
    if (!v) return std::nullopt;
    if (*v != std::floor(*v) || std::fabs(*v) > static_cast<double>(kMaxReductionSpan))
        return std::nullopt;
    return static_cast<long long>(*v);
}

// Single-argument function semantics; \log means the natural logarithm.
// Reciprocal forms go through division so a zero denominator becomes inf
// and the caller's guard turns it into a DomainError.
double apply_function(const std::string& cmd, double x) {
    if (cmd == "sin") return std::sin(x);
    if (cmd == "cos") return std::cos(x);
    if (cmd == "tan") return std::tan(x);
    if (cmd == "cot") return std::cos(x) / std::sin(x);
    if (cmd == "sec") return 1.0 / std::cos(x);
    if (cmd == "csc") return 1.0 / std::sin(x);
    if (cmd == "arcsin") return std::asin(x);
    if (cmd == "arccos") return std::acos(x);
    if (cmd == "arctan") return std::atan(x);
    if (cmd == "sinh") return std::sinh(x);
    if (cmd == "cosh") return std::cosh(x);
    if (cmd == "tanh") return std::tanh(x);
    if (cmd == "exp") return std::exp(x);
    if (cmd == "ln" || cmd == "log") {
        if (x <= 0.0) bail(EvalFailure::DomainError, "log of non-positive value");
        return std::log(x);
    }
    bail(EvalFailure::OpaquePresent, "function without numeric reading: " + cmd);
}

double ev(const ExprPtr& e, const Assignment& a);

double ev_bigop(const BigOp& op, const Assignment& a) {
    switch (op.kind) {
        case BigOpKind::Sum:
        case BigOpKind::Prod: {
            if (!op.bound_var || !op.lower || !op.upper)
                bail(EvalFailure::OpaquePresent, "reduction without literal bounds");
            auto lo = integer_literal(op.lower);
            auto hi = integer_literal(op.upper);
            if (!lo || !hi)
                bail(EvalFailure::OpaquePresent, "reduction without literal bounds");
            if (*hi - *lo > kMaxReductionSpan)
                bail(EvalFailure::OpaquePresent, "reduction bounds too wide");
            const std::string key = atom_key(op.bound_var);
            Assignment inner = a;
            double acc = op.kind == BigOpKind::Sum ? 0.0 : 1.0;
            for (long long k = *lo; k <= *hi; ++k) {
                inner.bindings[key] = static_cast<double>(k);
                const double body = ev(op.body, inner);
                acc = op.kind == BigOpKind::Sum ? acc + body : acc * body;
                guard(acc);
            }
            return acc;
        }
        case BigOpKind::Integral: {
            if (!op.differential || !op.lower || !op.upper)
                bail(EvalFailure::OpaquePresent, "integral without bounds");
            const std::string var = atom_key(op.differential);
            const auto free = free_symbols(op.body);
            if (std::binary_search(free.begin(), free.end(), var))
                bail(EvalFailure::OpaquePresent, "integrand depends on the variable");
            const double width = guard(ev(op.upper, a) - ev(op.lower, a));
            return guard(width * ev(op.body, a));
        }
        case BigOpKind::ContourIntegral:
            bail(EvalFailure::OpaquePresent, "contour integral");
    }
    bail(EvalFailure::OpaquePresent, "unknown reduction");
}

double ev(const ExprPtr& e, const Assignment& a) {
    const ExprNode& node = e->node;

    if (std::get_if<Number>(&node)) {
        auto v = literal_value(e);
        if (!v) bail(EvalFailure::OpaquePresent, "unreadable number literal");
        return *v;
    }
    if (std::get_if<Symbol>(&node) || std::get_if<Greek>(&node)) {
        const std::string key = atom_key(e);
        auto it = a.bindings.find(key);
        if (it == a.bindings.end()) bail(EvalFailure::UnboundSymbol, key);
        return it->second;
    }
    if (const auto* c = std::get_if<Constant>(&node)) {
        switch (c->kind) {
            case ConstKind::Pi: return kPi;
            case ConstKind::EulerE: return kEuler;
            case ConstKind::HBar: return kPlanckH / (2.0 * kPi);
            case ConstKind::PlanckH: return kPlanckH;
        }
    }
    if (const auto* n = std::get_if<Neg>(&node)) return -ev(n->operand, a);
    if (const auto* b = std::get_if<BinOp>(&node)) {
        switch (b->op) {
            case BinKind::Add: return guard(ev(b->lhs, a) + ev(b->rhs, a));
            case BinKind::Sub: return guard(ev(b->lhs, a) - ev(b->rhs, a));
            case BinKind::Mul:
            case BinKind::ImplicitMul: {
                if (b->op == BinKind::ImplicitMul) {
                    if (is_display_mark(b->lhs)) return ev(b->rhs, a);
                    if (is_display_mark(b->rhs)) return ev(b->lhs, a);
                }
                if (is_zero_literal(b->lhs)) return 0.0;  // right factor masked
                return guard(ev(b->lhs, a) * ev(b->rhs, a));
            }
            case BinKind::Div: {
                const double den = ev(b->rhs, a);
                if (den == 0.0) bail(EvalFailure::DomainError, "division by zero");
                return guard(ev(b->lhs, a) / den);
            }
            case BinKind::Pow:
                return guard(std::pow(ev(b->lhs, a), ev(b->rhs, a)));
        }
    }
    if (const auto* f = std::get_if<Fraction>(&node)) {
        const double den = ev(f->den, a);
        if (den == 0.0) bail(EvalFailure::DomainError, "division by zero");
        return guard(ev(f->num, a) / den);
    }
    if (const auto* f = std::get_if<Function>(&node)) {
        if (f->head || f->args.size() != 1)
            bail(EvalFailure::OpaquePresent, "uninterpreted function");
        double v = apply_function(f->cmd, ev(f->args[0], a));
        if (f->power) v = std::pow(v, ev(f->power, a));
        return guard(v);
    }
    if (const auto* op = std::get_if<BigOp>(&node)) return ev_bigop(*op, a);
    if (const auto* g = std::get_if<Group>(&node)) {
        const double v = ev(g->inner, a);
        return g->bracket == BracketKind::Vert ? std::fabs(v) : v;
    }
    // Partial, Opaque, Mark, Relation, Rows: no numeric reading.
    bail(EvalFailure::OpaquePresent, "construct without numeric reading");
}

double draw_value(Rng& rng) {
    const double magnitude = rng.range(0.1, 10.0);
    return (rng.next() & 1) ? -magnitude : magnitude;
}

}  // namespace

// ============================================================================
// Public API
// ============================================================================

EvalResult eval(const ExprPtr& e, const Assignment& a) {
    EvalResult out;
    if (!e) {
        out.failure = EvalFailure::OpaquePresent;
        out.detail = "empty expression";
        return out;
    }
    try {
        out.value = ev(e, a);
    } catch (const Bail& b) {
        out.failure = b.failure;
        out.detail = b.detail;
    }
    return out;
}

Assignment random_assignment(const ExprPtr& e, Rng& rng) {
    Assignment a;
    for (const std::string& name : free_symbols(e)) a.bindings[name] = draw_value(rng);
    return a;
}

VerificationReport verify_equiv(const ExprPtr& original, const ExprPtr& transformed,
                                const std::optional<Renaming>& renaming, int trials,
                                double tol, std::uint64_t seed) {
    VerificationReport rep;
    if (!(tol > 0.0)) {
        rep.verdict = Verdict::Fail;  // caller broke the contract; fail loudly
        return rep;
    }
    trials = std::max(trials, 1);
    const int budget = 10 * trials;

    Renaming inverse;  // new name -> old name
    if (renaming)
        for (const auto& [from, to] : *renaming) inverse[to] = from;
    const std::vector<std::string> transformed_free = free_symbols(transformed);

    int attempts = 0;
    int completed = 0;
    while (completed < trials) {
        if (attempts >= budget) {
            rep.verdict = Verdict::BudgetExhausted;
            rep.trials_run = completed;
            return rep;
        }
        Rng rng = Rng::stream(seed, kStreamTrial, static_cast<std::uint64_t>(attempts));
        ++attempts;

        Assignment a = random_assignment(original, rng);
        // Transformed side: renamed symbols inherit the old symbol's value,
        // shared symbols keep theirs, genuinely fresh symbols (the φ of the
        // trig identity) get independent draws from the same stream.
        Assignment b;
        for (const std::string& name : transformed_free) {
            if (auto inv = inverse.find(name); inv != inverse.end()) {
                if (auto src = a.bindings.find(inv->second); src != a.bindings.end()) {
                    b.bindings[name] = src->second;
                    continue;
                }
            }
            if (auto same = a.bindings.find(name); same != a.bindings.end()) {
                b.bindings[name] = same->second;
                continue;
            }
            b.bindings[name] = draw_value(rng);
        }

        const EvalResult v1 = eval(original, a);
        const EvalResult v2 = eval(transformed, b);
        if (!v1.ok() || !v2.ok()) {
            const bool opaque1 = !v1.ok() && v1.failure == EvalFailure::OpaquePresent;
            const bool opaque2 = !v2.ok() && v2.failure == EvalFailure::OpaquePresent;
            if (opaque1 && opaque2) {
                rep.verdict = Verdict::Indeterminate;
                rep.trials_run = completed;
                return rep;
            }
            const bool domain1 = !v1.ok() && v1.failure == EvalFailure::DomainError;
            const bool domain2 = !v2.ok() && v2.failure == EvalFailure::DomainError;
            if (domain1 || domain2) continue;  // unlucky draw; try another
            // One side refuses while the other evaluates (or a symbol went
            // unbound): the rewrite changed evaluability, which equivalence
            // never does.
            rep.verdict = Verdict::Fail;
            rep.trials_run = completed;
            return rep;
        }

        const double diff = std::fabs(*v1.value - *v2.value);
        const double floor = std::max(1.0, std::fabs(*v1.value));
        rep.max_deviation = std::max(rep.max_deviation, diff / floor);
        if (diff > tol * floor) {
            rep.verdict = Verdict::Fail;
            rep.trials_run = completed + 1;
            return rep;
        }
        ++completed;
    }

    rep.verdict = Verdict::Pass;
    rep.trials_run = completed;
    return rep;
}

}  // namespace z2h
