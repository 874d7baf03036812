#pragma once

#include <memory>
#include <string>

#include "toricma/polygon.hpp"
#include "toricma/types.hpp"

namespace toricma {

/// Arithmetic expression over x1, x2, l1..lN and prod_l.
///
/// Grammar: numbers, + - * / ^, unary minus, parentheses, |e|, and the
/// functions abs, sqrt, exp, log, pow, min, max. Constants pi and e.
class Expression {
public:
    struct Node;

    /// Throws Error(ConfigError) on a syntax error or an unknown name.
    static Expression parse(const std::string& source);

    /// Evaluates at x; edge functions are taken from polygon when referenced.
    double evaluate(Point x, const Polygon* polygon = nullptr) const;

    /// True when no abs, bars, roots, min/max or non-integer powers appear.
    bool is_smooth() const { return smooth_; }
    /// Largest edge index referenced (1-based), zero when none.
    int max_edge_index() const { return max_edge_; }
    bool uses_edges() const { return max_edge_ > 0 || uses_product_; }
    const std::string& source() const { return source_; }

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
    bool smooth_ = true;
    int max_edge_ = 0;
    bool uses_product_ = false;
};

}  // namespace toricma
