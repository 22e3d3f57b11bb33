#pragma once
// Dense-matrix GCN graph classifier with hand-derived backprop.
//
// Forward: Ahat = D^{-1/2}(A+I)D^{-1/2}; H1 = relu(Ahat X W0);
// H2 = relu(Ahat H1 W1); h_G = column mean of H2; two relu FC layers
// (32, 16, biased); sigmoid output clamped to [1e-7, 1-1e-7].
// Loss: binary cross-entropy. Optimizer: SGD, batch size 1.

#include <cstdint>
#include <string>
#include <vector>

#include "kbfresh/kb_model.hpp"
#include "kbfresh/matrix.hpp"

namespace kbfresh {

inline constexpr std::size_t kGcnHidden = 64;
inline constexpr std::size_t kFc1 = 32;
inline constexpr std::size_t kFc2 = 16;
inline constexpr double kProbClamp = 1e-7;

struct GcnParams {
    std::size_t f = 0;
    Mat W0;   // f x 64, no bias
    Mat W1;   // 64 x 64, no bias
    Mat F1;   // 64 x 32
    Mat F2;   // 32 x 16
    Mat Out;  // 16 x 1
    Mat b1;   // 1 x 32
    Mat b2;   // 1 x 16
    double b_out = 0.0;
};

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))) from the seed, zero biases.
GcnParams init_params(std::size_t f, std::uint64_t seed);

// Input must be square, binary, symmetric, zero-diagonal.
Mat normalize_adjacency(const Mat& a);

Mat adjacency_matrix(const PropertyGraph& g);

struct ForwardCache {
    Mat m0;   // Ahat X        (n x f)
    Mat h1;   // relu(m0 W0)   (n x 64)
    Mat m1;   // Ahat h1       (n x 64)
    Mat h2;   // relu(m1 W1)   (n x 64)
    Mat hg;   // 1 x 64 column mean of h2
    Mat z1;   // 1 x 32 post-relu
    Mat z2;   // 1 x 16 post-relu
    Mat ahat; // n x n
    Mat x;    // n x f
    double p = 0.5;  // clamped sigmoid output
};

ForwardCache gcn_forward(const PropertyGraph& g, const GcnParams& params);

double bce_loss(double p, int y);

struct GcnGrads {
    Mat W0, W1, F1, F2, Out, b1, b2;
    double b_out = 0.0;
};

// Analytic gradients of bce_loss(cache.p, y) w.r.t. every parameter.
GcnGrads gcn_backward(const GcnParams& params, const ForwardCache& cache, int y);

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 25;
    std::uint64_t seed = 0;
    double train_frac = 0.64;
    double test_frac = 0.16;
    double val_frac = 0.20;
    double threshold = 0.5;
};

// Seeded shuffle, then largest-remainder rounding of the fractions in
// (train, test, val) order; buckets take consecutive runs of the shuffle.
struct SplitIndices {
    std::vector<std::size_t> train, test, val;
};
SplitIndices split_dataset(std::size_t n, const TrainConfig& config);

struct TrainingCurves {
    std::vector<double> train_loss, train_acc, val_loss, val_acc;  // one entry per epoch
};

struct TrainResult {
    GcnParams params;
    TrainingCurves curves;
    SplitIndices split;
};

// SGD over the train bucket, one example at a time, train order reshuffled
// each epoch from the same seeded stream. Curves are measured after each
// epoch. Training split containing a single class -> ConfigError.
TrainResult train(const std::vector<PropertyGraph>& dataset, const TrainConfig& config);

struct Prediction {
    int label = 0;
    double score = 0.0;
};
Prediction predict(const PropertyGraph& g, const GcnParams& params, double threshold);

// Logistic regression over mean-pooled raw node features; same split and
// curve semantics as train(). Weights start at zero.
struct LogisticModel {
    std::vector<double> w;
    double b = 0.0;
};
double logistic_score(const LogisticModel& model, const PropertyGraph& g);

struct LogisticResult {
    LogisticModel model;
    TrainingCurves curves;
    SplitIndices split;
};
LogisticResult baseline_logistic(const std::vector<PropertyGraph>& dataset,
                                 const TrainConfig& config);

// model.json: {"version": 1, "f": ..., flat row-major weight arrays};
// bit-exact round trip.
void save_model(const GcnParams& params, const std::string& path);
GcnParams load_model(const std::string& path);

// curves.csv: epoch,train_loss,train_acc,val_loss,val_acc with one row per epoch.
void save_curves(const TrainingCurves& curves, const std::string& path);

}  // namespace kbfresh
