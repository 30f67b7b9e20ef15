#include "consol/tape.hpp"

#include <array>
#include <stdexcept>

namespace consol {

namespace {

Tape* shared_tape(const Var& a, const Var& b) {
  Tape* t = a.tape() != nullptr ? a.tape() : b.tape();
  if (a.tape() != nullptr && b.tape() != nullptr && a.tape() != b.tape()) {
    throw std::invalid_argument("Var: operands recorded on different tapes");
  }
  return t;
}

Var binary(const Var& a, const Var& b, double value, double da, double db) {
  Tape* tape = shared_tape(a, b);
  if (tape == nullptr) return Var(value);
  const std::array<std::pair<Var, double>, 2> parents{{{a, da}, {b, db}}};
  return tape->record(value, parents);
}

}  // namespace

Var Tape::leaf(double value) {
  nodes_.push_back(Node{static_cast<std::uint32_t>(edges_.size()), 0});
  return Var(this, nodes_.size() - 1, value);
}

Var Tape::record(double value, std::span<const std::pair<Var, double>> parents) {
  const auto first = static_cast<std::uint32_t>(edges_.size());
  std::uint32_t count = 0;
  for (const auto& [var, partial] : parents) {
    if (var.is_constant()) continue;
    if (var.tape() != this) throw std::invalid_argument("Tape::record: foreign variable");
    edges_.push_back(Edge{var.index(), partial});
    ++count;
  }
  if (count == 0) return Var(value);
  nodes_.push_back(Node{first, count});
  return Var(this, nodes_.size() - 1, value);
}

std::vector<double> Tape::adjoints(const Var& output) const {
  std::vector<double> adj(nodes_.size(), 0.0);
  if (output.is_constant()) return adj;
  if (output.tape() != this) throw std::invalid_argument("Tape::adjoints: foreign variable");
  adj[output.index()] = 1.0;
  for (std::size_t i = output.index() + 1; i-- > 0;) {
    const double a = adj[i];
    if (a == 0.0) continue;
    const Node& node = nodes_[i];
    for (std::uint32_t e = node.first_edge; e < node.first_edge + node.edge_count; ++e) {
      adj[edges_[e].parent] += a * edges_[e].partial;
    }
  }
  return adj;
}

void Tape::clear() {
  nodes_.clear();
  edges_.clear();
}

void Tape::reserve(std::size_t nodes, std::size_t edges) {
  nodes_.reserve(nodes);
  edges_.reserve(edges);
}

Var operator+(const Var& a, const Var& b) { return binary(a, b, a.value() + b.value(), 1.0, 1.0); }

Var operator-(const Var& a, const Var& b) { return binary(a, b, a.value() - b.value(), 1.0, -1.0); }

Var operator*(const Var& a, const Var& b) {
  return binary(a, b, a.value() * b.value(), b.value(), a.value());
}

Var operator-(const Var& a) { return binary(a, Var(), -a.value(), -1.0, 0.0); }

Var square(const Var& a) { return binary(a, Var(), a.value() * a.value(), 2.0 * a.value(), 0.0); }

Var sum(std::span<const Var> terms) {
  Tape* tape = nullptr;
  double total = 0.0;
  for (const Var& v : terms) {
    total += v.value();
    if (tape == nullptr) tape = v.tape();
  }
  if (tape == nullptr) return Var(total);
  std::vector<std::pair<Var, double>> parents;
  parents.reserve(terms.size());
  for (const Var& v : terms) parents.emplace_back(v, 1.0);
  return tape->record(total, parents);
}

Var mean(std::span<const Var> terms) {
  if (terms.empty()) throw std::invalid_argument("mean: empty input");
  const double w = 1.0 / static_cast<double>(terms.size());
  Tape* tape = nullptr;
  double total = 0.0;
  for (const Var& v : terms) {
    total += v.value();
    if (tape == nullptr) tape = v.tape();
  }
  if (tape == nullptr) return Var(total * w);
  std::vector<std::pair<Var, double>> parents;
  parents.reserve(terms.size());
  for (const Var& v : terms) parents.emplace_back(v, w);
  return tape->record(total * w, parents);
}

JetVar make_leaf_jet(Tape& tape, const Jet& jet) {
  JetVar out;
  for (Channel c : kAllChannels) out[c] = tape.leaf(jet[c]);
  return out;
}

}  // namespace consol
