#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epictrl/tensor.hpp"

namespace epictrl {

/// Layer widths of the recurrent Q-network.
struct NetworkSizes {
    std::size_t input_width = 7;
    std::size_t seq_len = 30;
    std::size_t hidden = 32; // per direction
    std::size_t recurrent_layers = 3;
    std::vector<std::size_t> dense_hidden = {64};
    std::size_t outputs = 4;

    /// Throws SizeMismatch for zero widths or an empty recurrent stack.
    void validate() const;

    /// Closed-form number of scalar parameters.
    std::size_t parameter_count() const;

    bool operator==(const NetworkSizes&) const = default;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One LSTM direction. Gate blocks are stacked input, forget, cell, output.
struct LstmCellParams {
    RowMatrix w; // 4H x in
    RowMatrix u; // 4H x H
    Eigen::VectorXd b;
};

struct BiLstmLayerParams {
    LstmCellParams forward;
    LstmCellParams backward;
};

struct DenseParams {
    RowMatrix w; // out x in
    Eigen::VectorXd b;
};

struct ParamView {
    std::string name;
    std::vector<std::size_t> shape;
    std::span<double> values;
};

struct ConstParamView {
    std::string name;
    std::vector<std::size_t> shape;
    std::span<const double> values;
};

/// Weights of the full network; gradients and optimizer moments reuse this type.
struct NetworkParams {
    NetworkSizes sizes;
    std::vector<BiLstmLayerParams> recurrent;
    std::vector<DenseParams> dense;

    static NetworkParams zeros(const NetworkSizes& sizes);

    /// Every parameter tensor in a fixed order with a stable name.
    std::vector<ParamView> views();
    std::vector<ConstParamView> views() const;

    std::size_t parameter_count() const;

    bool operator==(const NetworkParams& other) const;
};

/// Glorot-uniform weights from a seeded generator, zero biases except the
/// forget gate, which starts at 1.
NetworkParams init_network(std::uint64_t seed, const NetworkSizes& sizes);

/// Time-major batch: timestep t occupies columns [t * batch, (t + 1) * batch).
struct Sequence {
    Eigen::MatrixXd data; // features x (steps * batch)
    std::size_t steps = 0;
    std::size_t batch = 0;

    Sequence() = default;
    Sequence(std::size_t features, std::size_t steps_, std::size_t batch_)
        : data(static_cast<Eigen::Index>(features), static_cast<Eigen::Index>(steps_ * batch_)),
          steps(steps_), batch(batch_)
    {
    }

    auto step(std::size_t t)
    {
        return data.middleCols(static_cast<Eigen::Index>(t * batch),
                               static_cast<Eigen::Index>(batch));
    }
    auto step(std::size_t t) const
    {
        return data.middleCols(static_cast<Eigen::Index>(t * batch),
                               static_cast<Eigen::Index>(batch));
    }
};

/// B x T x F tensor to a time-major sequence. Throws ShapeMismatch.
Sequence to_sequence(const Tensor& batch, const NetworkSizes& sizes);

/// Activations retained by a forward pass for backpropagation. Every matrix is
/// time-major like Sequence.
struct ForwardCache {
    struct Direction {
        Eigen::MatrixXd gates; // activated i, f, g, o: 4H x (T * B)
        Eigen::MatrixXd cell;
        Eigen::MatrixXd cell_tanh;
        Eigen::MatrixXd hidden;
    };
    struct Layer {
        Sequence input;
        Direction forward;
        Direction backward; // indexed by time, not processing order
    };
    std::vector<Layer> layers;
    std::vector<Eigen::MatrixXd> dense_input;
    std::vector<Eigen::MatrixXd> dense_pre; // pre-activation outputs
    std::size_t batch = 0;

    // backward-pass buffers, kept here so repeated steps reuse the memory
    struct Scratch {
        std::vector<Eigen::MatrixXd> layer_grads;
        Eigen::MatrixXd dz;
    };
    mutable Scratch scratch;
};

/// Q-values as an (outputs x B) matrix. Fills cache when given.
Eigen::MatrixXd forward(const NetworkParams& params, const Sequence& input,
                        ForwardCache* cache = nullptr);

/// B x T x F batch to a B x outputs tensor.
Tensor forward(const NetworkParams& params, const Tensor& batch);

/// Exact gradients through time for an (outputs x B) upstream gradient.
NetworkParams backward(const NetworkParams& params, const ForwardCache& cache,
                       const Eigen::MatrixXd& upstream);

/// As above, writing into grads (resized and overwritten).
void backward(const NetworkParams& params, const ForwardCache& cache,
              const Eigen::MatrixXd& upstream, NetworkParams& grads);

/// Recomputes the forward pass, then backpropagates a B x outputs gradient.
NetworkParams backward(const NetworkParams& params, const Tensor& batch, const Tensor& upstream);

} // namespace epictrl
