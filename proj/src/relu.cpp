#include "memgan/relu.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memgan {

SparseLayer::SparseLayer(int rows_, int cols_, std::vector<Triplet> triplets_,
                         std::vector<double> bias_, Activation act)
    : rows(rows_), cols(cols_), triplets(std::move(triplets_)),
      bias(std::move(bias_)), activation(act) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("SparseLayer: empty shape");
  if (static_cast<int>(bias.size()) != rows)
    throw std::invalid_argument("SparseLayer: bias size != rows");
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("SparseLayer: triplet index out of range");
    if (!std::isfinite(t.value)) throw std::invalid_argument("SparseLayer: non-finite weight");
  }
  for (double b : bias)
    if (!std::isfinite(b)) throw std::invalid_argument("SparseLayer: non-finite bias");

  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  for (std::size_t i = 1; i < triplets.size(); ++i)
    if (triplets[i].col == triplets[i - 1].col && triplets[i].row == triplets[i - 1].row)
      throw std::invalid_argument("SparseLayer: duplicate (row, col) triplet");

  col_start_.assign(cols + 1, 0);
  for (const auto& t : triplets) ++col_start_[t.col + 1];
  for (int c = 0; c < cols; ++c) col_start_[c + 1] += col_start_[c];
}

std::size_t SparseLayer::nonzero_weights() const {
  std::size_t n = 0;
  for (const auto& t : triplets)
    if (t.value != 0.0) ++n;
  return n;
}

void SparseLayer::apply(const std::vector<double>& in, std::vector<double>& out) const {
  out = bias;
  for (int c = 0; c < cols; ++c) {
    const double x = in[c];
    if (x == 0.0) continue;  // exact skip; 0*w contributes nothing
    for (std::size_t i = col_start_[c]; i < col_start_[c + 1]; ++i)
      out[triplets[i].row] += triplets[i].value * x;
  }
  if (activation == Activation::relu)
    for (double& v : out) v = v > 0.0 ? v : 0.0;
}

ReluNetwork::ReluNetwork(int input_dim, std::vector<SparseLayer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim < 1) throw std::invalid_argument("ReluNetwork: input_dim < 1");
  if (layers_.empty()) {
    output_dim_ = input_dim;
    return;
  }
  int dim = input_dim_;
  for (const auto& l : layers_) {
    if (l.cols != dim) throw std::invalid_argument("ReluNetwork: layer dimensions do not chain");
    dim = l.rows;
  }
  output_dim_ = dim;
}

std::vector<double> ReluNetwork::forward(const std::vector<double>& input) const {
  if (static_cast<int>(input.size()) != input_dim_)
    throw std::invalid_argument("ReluNetwork::forward: input dimension mismatch");
  std::vector<double> a = input, b;
  for (const auto& l : layers_) {
    l.apply(a, b);
    std::swap(a, b);
  }
  return a;
}

std::size_t ReluNetwork::nonzero_weights() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.nonzero_weights();
  return n;
}

nlohmann::json ReluNetwork::to_json() const {
  nlohmann::json j;
  j["input_dim"] = input_dim_;
  j["output_dim"] = output_dim_;
  auto layers = nlohmann::json::array();
  for (const auto& l : layers_) {
    nlohmann::json lj;
    lj["rows"] = l.rows;
    lj["cols"] = l.cols;
    auto trips = nlohmann::json::array();
    for (const auto& t : l.triplets) trips.push_back({t.row, t.col, t.value});
    lj["triplets"] = std::move(trips);
    lj["bias"] = l.bias;
    lj["activation"] = l.activation == Activation::relu ? "relu" : "identity";
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j;
}

ReluNetwork ReluNetwork::from_json(const nlohmann::json& j) {
  const int input_dim = j.at("input_dim").get<int>();
  std::vector<SparseLayer> layers;
  for (const auto& lj : j.at("layers")) {
    std::vector<Triplet> trips;
    for (const auto& tj : lj.at("triplets"))
      trips.push_back({tj.at(0).get<int>(), tj.at(1).get<int>(), tj.at(2).get<double>()});
    const std::string act = lj.at("activation").get<std::string>();
    if (act != "relu" && act != "identity")
      throw std::invalid_argument("ReluNetwork: unknown activation " + act);
    layers.emplace_back(lj.at("rows").get<int>(), lj.at("cols").get<int>(), std::move(trips),
                        lj.at("bias").get<std::vector<double>>(),
                        act == "relu" ? Activation::relu : Activation::identity);
  }
  ReluNetwork net(input_dim, std::move(layers));
  if (net.output_dim() != j.at("output_dim").get<int>())
    throw std::invalid_argument("ReluNetwork: output_dim mismatch in serialized form");
  return net;
}

}  // namespace memgan
