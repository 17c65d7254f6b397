// metric.cpp - complexity scoring
//
// One recursive walk computes every component.  The walk's child set is
// identical to ast.cpp's walk(): scripts, bounds, differentials and
// alignment chunks all count, null slots never do.  Greek letters hiding
// inside Opaque bytes are found by command-name matching so the metric
// still sees them when the parser could not.

#include "zero2hero/metric.hpp"

#include <algorithm>

namespace z2h {

namespace {

struct Tally {
    int nodes = 0;
    int greek = 0;
    int bigops = 0;
    unsigned kinds = 0;  // bitmask over ExprNode variant tags
};

bool is_cmd_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Occurrences of \<greek-name> inside unparsed bytes.
int greek_in_raw(const std::string& raw) {
    int count = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\\') continue;
        std::size_t j = i + 1;
        while (j < raw.size() && is_cmd_letter(raw[j])) ++j;
        if (j > i + 1 && is_greek_command({raw.data() + i + 1, j - i - 1})) ++count;
        i = j - 1;
    }
    return count;
}

// Returns the subtree depth (leaf = 1) while accumulating counts.
int visit(const ExprPtr& e, Tally& t) {
    if (!e) return 0;
    ++t.nodes;
    t.kinds |= 1u << e->node.index();

    int child = 0;
    auto deep = [&](const ExprPtr& c) { child = std::max(child, visit(c, t)); };

    if (const auto* s = std::get_if<Symbol>(&e->node)) {
        deep(s->sub);
    } else if (const auto* g = std::get_if<Greek>(&e->node)) {
        ++t.greek;
        deep(g->sub);
    } else if (const auto* n = std::get_if<Neg>(&e->node)) {
        deep(n->operand);
    } else if (const auto* b = std::get_if<BinOp>(&e->node)) {
        deep(b->lhs);
        deep(b->rhs);
    } else if (const auto* f = std::get_if<Fraction>(&e->node)) {
        deep(f->num);
        deep(f->den);
    } else if (const auto* f = std::get_if<Function>(&e->node)) {
        deep(f->head);
        deep(f->power);
        for (const auto& arg : f->args) deep(arg);
    } else if (const auto* op = std::get_if<BigOp>(&e->node)) {
        ++t.bigops;
        deep(op->bound_var);
        deep(op->lower);
        deep(op->upper);
        deep(op->body);
        deep(op->differential);
    } else if (const auto* p = std::get_if<Partial>(&e->node)) {
        ++t.bigops;
        deep(p->wrt);
        deep(p->operand);
    } else if (const auto* g = std::get_if<Group>(&e->node)) {
        deep(g->inner);
    } else if (const auto* o = std::get_if<Opaque>(&e->node)) {
        t.greek += greek_in_raw(o->raw);
    } else if (const auto* r = std::get_if<Relation>(&e->node)) {
        for (const auto& operand : r->operands) deep(operand);
    } else if (const auto* rows = std::get_if<Rows>(&e->node)) {
        for (const auto& row : rows->rows)
            for (const auto& chunk : row.chunks) deep(chunk);
    }
    // Number, Constant, Mark: leaves.

    return child + 1;
}

int popcount(unsigned v) {
    int n = 0;
    for (; v; v >>= 1) n += static_cast<int>(v & 1u);
    return n;
}

}  // namespace

ComplexityScore score(const ExprPtr& e) {
    ComplexityScore s;
    if (!e) return s;
    Tally t;
    s.max_depth = visit(e, t);
    s.node_count = t.nodes;
    s.greek_count = t.greek;
    s.bigop_count = t.bigops;
    s.op_diversity = popcount(t.kinds);
    s.total = s.node_count + 2 * s.greek_count + 3 * s.bigop_count + 2 * s.max_depth +
              s.op_diversity;
    return s;
}

Ordering compare(const ComplexityScore& before, const ComplexityScore& after) {
    auto key = [](const ComplexityScore& s) {
        return std::tuple(s.total, s.bigop_count, s.greek_count, s.node_count);
    };
    const auto a = key(before);
    const auto b = key(after);
    if (a < b) return Ordering::Less;
    if (b < a) return Ordering::Greater;
    return Ordering::Equal;
}

std::string score_row(std::size_t index, const ComplexityScore& before,
                      const ComplexityScore& after) {
    std::string row = "eq#" + std::to_string(index);
    row += " before=" + std::to_string(before.total);
    row += " after=" + std::to_string(after.total);
    row += " Δ=" + std::to_string(after.total - before.total);
    row += " greek +" + std::to_string(after.greek_count - before.greek_count);
    row += " bigops +" + std::to_string(after.bigop_count - before.bigop_count);
    return row;
}

}  // namespace z2h
