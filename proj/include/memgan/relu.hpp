#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace memgan {

enum class Activation { relu, identity };

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// One affine + activation stage. Weights are sparse (row, col, value)
// triplets, canonicalized to column-major order so the interpreter can
// skip zero input coordinates.
struct SparseLayer {
  int rows = 0;
  int cols = 0;
  std::vector<Triplet> triplets;
  std::vector<double> bias;  // size rows
  Activation activation = Activation::relu;

  SparseLayer() = default;
  SparseLayer(int rows_, int cols_, std::vector<Triplet> triplets_,
              std::vector<double> bias_, Activation act);

  std::size_t nonzero_weights() const;
  void apply(const std::vector<double>& in, std::vector<double>& out) const;

 private:
  std::vector<std::size_t> col_start_;  // size cols+1, into triplets
  friend struct SparseLayerAccess;
};

// Layered sparse ReLU computation graph; immutable once constructed.
class ReluNetwork {
 public:
  ReluNetwork() = default;
  ReluNetwork(int input_dim, std::vector<SparseLayer> layers);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  const std::vector<SparseLayer>& layers() const { return layers_; }

  std::vector<double> forward(const std::vector<double>& input) const;
  std::size_t nonzero_weights() const;

  nlohmann::json to_json() const;
  static ReluNetwork from_json(const nlohmann::json& j);

 private:
  int input_dim_ = 0;
  int output_dim_ = 0;
  std::vector<SparseLayer> layers_;
};

}  // namespace memgan
