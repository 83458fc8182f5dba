#pragma once

#include "pap/common.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pap {

enum class VType : std::uint8_t { square = 0, circle = 1 };

struct Edge {
    int s = 0, c = 0, label = 1;
    auto operator<=>(const Edge&) const = default;
};

enum class AutSemantics { set, ordered };

struct Shape {
    std::vector<VType> types;
    std::vector<int> U, V;
    std::vector<Edge> edges;

    int add_vertex(VType t);
    void add_edge(int s, int c, int label);
    void normalize();
    void validate() const;

    int num_vertices() const { return int(types.size()); }
    int num_squares() const;
    int num_circles() const;
    int total_label() const;
    int degree(int v) const;
    bool in_U(int v) const;
    bool in_V(int v) const;
    bool is_proper() const;
    bool is_trivial() const;
    bool index_squares_only() const;
    std::vector<int> middle() const;
    Shape transpose() const;
    std::string describe() const;
};

struct CanonicalResult {
    Shape shape;
    std::string key;
    Integer aut;
};

CanonicalResult canonicalize(const Shape& s);
Shape canonical_form(const Shape& s);
std::string canonical_key(const Shape& s);
Integer aut_size(const Shape& s, AutSemantics sem = AutSemantics::set);

// relabel vertices by perm: new id of old vertex v is perm[v]
Shape relabel(const Shape& s, const std::vector<int>& perm);

enum class ShapeFilter { all, calL, calL_bool };

struct CatalogOptions {
    int max_vertices = 12;
    int max_edges = 4;
    ShapeFilter filter = ShapeFilter::calL;
    int max_index = -1;          // cap on |U| and |V|, -1 means max_vertices
    bool right_empty = false;    // only V = {}
    std::size_t cap = 200000;
};

std::vector<Shape> enumerate_shapes(const CatalogOptions& opt);
std::vector<Shape> enumerate_shapes(int max_vertices, int max_edges, ShapeFilter f);

bool in_calL(const Shape& s, bool boolean_labels = false);

double weight(const Shape& s, const std::vector<int>& vertices, double n, double m);

struct Separator {
    std::vector<int> vertices;
    double weight = 0;
};
Separator min_vertex_separator(const Shape& s, double n, double m);
std::vector<int> isolated_middle(const Shape& s);

struct NormBoundOptions {
    double C = 1.0;
};
double norm_bound_exponent(const Shape& s, double n, double m);
double norm_bound(const Shape& s, double n, double m, const NormBoundOptions& opt = {});

// exact; shapes outside the family get 0
Rational lambda_coeff(const Shape& s, Basis b, int n);

struct ChargingExponents {
    double lhs = 0, rhs = 0;
    bool holds() const { return lhs <= rhs + 1e-12; }
};
// two degree-1 squares in U\V (or V\U) sharing a circle neighbour
bool has_spider_ends(const Shape& s);

ChargingExponents charging_exponent(const Shape& s, double n, double m, double eps);

// named shapes used in regression tests and demos
namespace shapes {
Shape trivial(int k);
Shape basic_spider();
Shape basic_non_spider();
Shape ribbon_symmetry_improper();
Shape fourier_example();
Shape ell(int k);
}  // namespace shapes

std::string shape_to_json(const Shape& s);

}  // namespace pap
