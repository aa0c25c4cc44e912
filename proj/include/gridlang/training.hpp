#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gridlang/agent.hpp"
#include "gridlang/corpus.hpp"
#include "gridlang/optim.hpp"

namespace gridlang {

// How speaker targets are drawn from a trajectory's support each time it
// appears in a batch.
enum class SubsampleMode : uint8_t {
  FixedN = 0,  // n targets without replacement (fixed- and free-order)
  All,         // the full support (local / long-distance individual learning)
  Balanced,    // all local plus an equal number of sampled split targets
};

struct TrainConfig {
  int hidden = 16;
  int batch = 16;
  int max_epochs = 500;
  int patience = 5;
  SubsampleMode subsample = SubsampleMode::FixedN;
  int n_subsample = 6;
  bool attention = true;
  AmsgradConfig optim;
  double grad_clip = 0.0;  // global-norm clip; 0 disables (the default)
  bool eval_test_each_epoch = true;
  bool track_split_fraction = false;  // long-distance diagnostics
  int max_decode_len = 40;
};

struct EpochRow {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_speaker = 0.0;
  double dev_listener = 0.0;
  double test_speaker = -1.0;  // -1 when not evaluated
  double test_listener = -1.0;
  double split_fraction = -1.0;
};

struct LearningCurve {
  std::vector<EpochRow> rows;
};

// Long format: epoch,split,role,accuracy,loss (one row per measurement).
void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve);

// Strict-improvement early stopping: stop after `patience` consecutive
// epochs without a new best.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  // Returns true when training should stop after this epoch.
  bool update(double metric) {
    if (metric > best_) {
      best_ = metric;
      since_best_ = 0;
      return false;
    }
    return ++since_best_ >= patience_;
  }

  double best() const { return best_; }

 private:
  int patience_;
  double best_ = -1.0;
  int since_best_ = 0;
};

// Pre-encoded training and evaluation material. Pairs drive batching and
// the listener; speaker targets are drawn per trajectory.
struct SpeakerSupport {
  std::vector<std::vector<int>> targets;  // word ids + EOS
  std::vector<int> local_indices;         // balanced-mode partition
  std::vector<int> split_indices;
};

struct EvalSet {
  std::vector<std::pair<int32_t, std::vector<int>>> listener_pairs;  // (traj, input ids)
  std::vector<int32_t> speaker_trajectories;                         // distinct, ascending
  std::vector<std::vector<std::vector<int>>> speaker_accept;         // word ids, no EOS
};

struct TrainingData {
  std::vector<std::vector<int>> traj_ids;  // action ids + EOS per trajectory index
  std::vector<std::pair<int32_t, std::vector<int>>> train_pairs;  // utterance ids + EOS
  std::vector<SpeakerSupport> speaker;  // indexed by trajectory; empty if unused
  EvalSet dev, test;
};

// Ground-truth data: speaker supports are the full enumerated target sets,
// evaluation acceptance sets the full support per trajectory.
TrainingData make_individual_data(const SplitCorpus& corpus, SubsampleMode mode);

// Reusable per-run buffers.
struct Workspace {
  EncodeCache enc;
  DecoderCache dec;
  std::vector<double> dlogits;
  std::vector<double> denc_states;
  std::vector<double> dc_final;
};

// Mean-over-targets sequence NLL for one trajectory (teacher forcing).
// Gradients accumulate into *grads when non-null. Throws on empty targets.
double speaker_loss(const AgentParams& agent, std::span<const int> input_ids,
                    const std::vector<std::vector<int>>& targets, AgentParams* grads,
                    Workspace& ws);

// Sequence NLL of the action sequence given the utterance.
double listener_loss(const AgentParams& agent, std::span<const int> utterance_ids,
                     std::span<const int> action_ids, AgentParams* grads, Workspace& ws);

double speaker_eval(const AgentParams& agent, const TrainingData& data, const EvalSet& ev,
                    int max_len);
double listener_eval(const AgentParams& agent, const TrainingData& data, const EvalSet& ev,
                     int max_len);

struct TrainResult {
  AgentParams agent;  // best-dev snapshot
  LearningCurve curve;
  int best_epoch = -1;
  double best_dev = -1.0;
  int epochs_run = 0;
};

// One training run: synchronous speaker+listener steps over shuffled pair
// batches, per-epoch dev evaluation, early stopping on the mean of the two
// dev accuracies.
TrainResult train_one(const TrainingData& data, const TrainConfig& config, uint64_t seed,
                      const LanguageSpec* track_spec = nullptr);

// The grid-search protocol: probe each (hidden, batch) with one seed, pick
// the best dev configuration, re-run it across the final seeds.
struct GridProbe {
  TrainConfig config;
  uint64_t seed = 0;
  TrainResult result;
};

struct IndividualOutcome {
  TrainConfig best_config;
  std::vector<GridProbe> probes;
  std::vector<GridProbe> finals;
};

IndividualOutcome train_individual(const SplitCorpus& corpus, const TrainConfig& base,
                                   std::span<const int> hidden_grid,
                                   std::span<const int> batch_grid, uint64_t probe_seed,
                                   std::span<const uint64_t> final_seeds, int jobs = 1);

}  // namespace gridlang
