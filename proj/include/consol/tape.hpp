#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "consol/jet.hpp"

namespace consol {

class Tape;

/// Scalar recorded on a Tape, or a plain constant when no tape is attached.
/// Arithmetic between variables appends nodes to their tape; constants never
/// create nodes.
class Var {
 public:
  Var() = default;
  Var(double constant) : value_(constant) {}  // NOLINT(google-explicit-constructor)

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  std::size_t index() const { return index_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
  double value_ = 0.0;
};

/// Linear reverse-mode tape. Each node stores its value and the local
/// partials with respect to its parents; `adjoints` sweeps the nodes in
/// reverse order once.
class Tape {
 public:
  struct Edge {
    std::size_t parent;
    double partial;
  };

  Var leaf(double value);

  /// Records a node with the given value and (parent, partial) pairs. Constant
  /// parents are dropped; if every parent is constant the result is a constant.
  Var record(double value, std::span<const std::pair<Var, double>> parents);

  /// d(output)/d(node) for every node on the tape.
  std::vector<double> adjoints(const Var& output) const;

  std::size_t size() const { return nodes_.size(); }
  void clear();
  void reserve(std::size_t nodes, std::size_t edges);

 private:
  struct Node {
    std::uint32_t first_edge;
    std::uint32_t edge_count;
  };

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

using JetVar = BasicJet<Var>;

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator-(const Var& a);
Var square(const Var& a);
Var sum(std::span<const Var> terms);
/// Arithmetic mean. Empty input is a contract violation.
Var mean(std::span<const Var> terms);

/// Puts every channel of `jet` on the tape as a leaf.
JetVar make_leaf_jet(Tape& tape, const Jet& jet);

}  // namespace consol
