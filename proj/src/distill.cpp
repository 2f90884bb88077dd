//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/distill.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "snet/evalkit.hpp"
#include "snet/losses.hpp"
#include "snet/optim.hpp"

namespace snet {

namespace {

Checkpoint snapshot_f32(const Checkpoint& src) {
  Checkpoint out;
  out.spec = src.spec;
  out.meta = src.meta;
  for (const auto& [id, p] : src.params) {
    LayerParams np;
    np.weight = Tensor::from_data(p.weight.shape(), p.weight.values(), true);
    np.bias = Tensor::from_data(p.bias.shape(), p.bias.values(), true);
    out.params.emplace(id, std::move(np));
  }
  canonicalize_f32(out);
  return out;
}

TrainResult train_impl(const NetworkSpec& student, const Checkpoint* teacher,
                       const Dataset& ds, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (cfg.alpha < 0) throw ConfigError("train: alpha must be >= 0");
  if (cfg.batch < 1) throw ConfigError("train: batch must be >= 1");
  std::vector<size_t> train_idx = ds.split_indices(Split::train);
  if (train_idx.empty()) throw StateError("train: dataset has no training split");

  if (teacher) {
    // Teacher smoke test: one forward on a training sample must succeed and
    // produce the frame shape the student will be asked to match.
    NoGradGuard ng;
    Batch probe = make_batch(ds, {train_idx[0]});
    ForwardResult out = forward_interpolate(*teacher, probe.frames);
    if (out.out.shape() != probe.gt.shape())
      throw ShapeError("train_distilled: teacher output " + shape_to_string(out.out.shape()) +
                       " does not match ground truth " + shape_to_string(probe.gt.shape()));
  }

  Checkpoint ckpt = init_checkpoint(student, Rng::derive(cfg.seed, 0x171));
  AdaMaxConfig ocfg;
  ocfg.lr = cfg.lr;
  AdaMax opt(ckpt.ordered_params(), ocfg);
  // Same seed => same batch sequence, independent of mode (paired runs).
  Rng shuffle_rng = Rng::seeded(Rng::derive(cfg.seed, 0x5f1));

  TrainResult res;
  res.log.seed = cfg.seed;
  double best_psnr = -1.0;
  const auto wall0 = std::chrono::steady_clock::now();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(train_idx);
    double tot_sum = 0.0, stud_sum = 0.0, dist_sum = 0.0;
    int64_t batches = 0;
    for (size_t pos = 0; pos < train_idx.size(); pos += static_cast<size_t>(cfg.batch)) {
      std::vector<size_t> idx(
          train_idx.begin() + static_cast<std::ptrdiff_t>(pos),
          train_idx.begin() + static_cast<std::ptrdiff_t>(
                                  std::min(pos + static_cast<size_t>(cfg.batch),
                                           train_idx.size())));
      Batch batch = make_batch(ds, idx);

      Tensor teacher_out;
      if (teacher) {
        NoGradGuard ng;
        teacher_out = forward_interpolate(*teacher, batch.frames).out;
      }
      ForwardResult fwd = forward_interpolate(ckpt, batch.frames);

      double total_v, stud_v, dist_v;
      Tensor total;
      if (teacher) {
        KdLoss kd = kd_total_loss(fwd.out, batch.gt, teacher_out, cfg.alpha,
                                  cfg.pyramid_levels);
        total = kd.total;
        stud_v = kd.stud.value();
        dist_v = kd.dist.value();
        total_v = total.value();
      } else {
        total = lap_loss(fwd.out, batch.gt, cfg.pyramid_levels);
        stud_v = total.value();
        dist_v = 0.0;
        total_v = stud_v;
      }
      if (!std::isfinite(total_v))
        throw TrainError("train: loss diverged at epoch " + std::to_string(epoch) +
                         " batch " + std::to_string(batches));
      backward(total);
      opt.step();
      ckpt.zero_grads();
      tot_sum += total_v;
      stud_sum += stud_v;
      dist_sum += dist_v;
      ++batches;
    }

    ValScore val = validate(ckpt, ds, Split::val);
    EpochLog row;
    row.epoch = epoch;
    row.total = tot_sum / static_cast<double>(batches);
    row.stud = stud_sum / static_cast<double>(batches);
    row.dist = dist_sum / static_cast<double>(batches);
    row.val_psnr = val.psnr_mean;
    row.val_ssim = val.ssim_mean;
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.log.epochs.push_back(row);
    ckpt.meta.loss_curve.push_back(row.total);

    if (val.psnr_mean > best_psnr) {
      best_psnr = val.psnr_mean;
      res.best_ckpt = snapshot_f32(ckpt);
      res.best_ckpt.meta.epoch = epoch;
    }
  }

  canonicalize_f32(ckpt);
  ckpt.meta.epoch = cfg.epochs;
  ckpt.meta.seed = cfg.seed;
  ckpt.meta.phase = teacher ? "distill" : "baseline";
  res.best_ckpt.meta.seed = cfg.seed;
  res.best_ckpt.meta.phase = ckpt.meta.phase;
  res.final_ckpt = std::move(ckpt);
  res.log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

}  // namespace

TrainResult train_baseline(const NetworkSpec& student, const Dataset& ds,
                           const TrainConfig& cfg) {
  if (cfg.mode != TrainMode::baseline)
    throw ConfigError("train_baseline: cfg.mode must be baseline");
  return train_impl(student, nullptr, ds, cfg);
}

TrainResult train_distilled(const NetworkSpec& student, const Checkpoint& teacher,
                            const Dataset& ds, const TrainConfig& cfg) {
  if (cfg.mode != TrainMode::distill)
    throw ConfigError("train_distilled: cfg.mode must be distill");
  return train_impl(student, &teacher, ds, cfg);
}

ValScore validate(const Checkpoint& ckpt, const Dataset& ds, Split split) {
  std::vector<size_t> idx = ds.split_indices(split);
  if (idx.empty()) throw StateError("validate: split is empty");
  NoGradGuard ng;
  const int64_t c = ds.manifest.channels, r = ds.manifest.res;
  double psnr_sum = 0.0, ssim_sum = 0.0;
  // Fixed ascending order so means are bitwise stable.
  const size_t chunk = 8;
  size_t done = 0;
  while (done < idx.size()) {
    std::vector<size_t> part(idx.begin() + static_cast<std::ptrdiff_t>(done),
                             idx.begin() + static_cast<std::ptrdiff_t>(
                                               std::min(done + chunk, idx.size())));
    Batch batch = make_batch(ds, part);
    Tensor out = forward_interpolate(ckpt, batch.frames).out;
    for (size_t i = 0; i < part.size(); ++i) {
      Tensor pred = reshape(slice_axis(out, 0, static_cast<int64_t>(i), 1), {c, r, r});
      Tensor gt = reshape(slice_axis(batch.gt, 0, static_cast<int64_t>(i), 1), {c, r, r});
      psnr_sum += psnr(pred, gt);
      ssim_sum += ssim(pred, gt);
    }
    done += part.size();
  }
  ValScore v;
  v.psnr_mean = psnr_sum / static_cast<double>(idx.size());
  v.ssim_mean = ssim_sum / static_cast<double>(idx.size());
  return v;
}

std::string runlog_csv(const RunLog& log) {
  std::ostringstream os;
  os << "epoch,total,stud,dist,val_psnr,val_ssim,seconds\n";
  for (const auto& e : log.epochs)
    os << e.epoch << "," << format_double(e.total) << "," << format_double(e.stud) << ","
       << format_double(e.dist) << "," << format_double(e.val_psnr) << ","
       << format_double(e.val_ssim) << "," << format_double(e.seconds) << "\n";
  return os.str();
}

}  // namespace snet
