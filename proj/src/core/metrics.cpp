/* Copyright 2026 The cpfl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cpfl/core/metrics.hpp"

#include <cmath>
#include <limits>

#include "cpfl/core/error.hpp"

namespace cpfl {

Vector predictive_probabilities(const ParticleSet& particles, std::span<const double> features,
                                const ModelSpec& model) {
  require(particles.count() >= 1, "no particles");
  require(particles.dim() == model.dim(), "particle dimension does not match model");
  Vector avg(model.num_classes, 0.0);
  Vector z(model.num_classes);
  for (std::size_t n = 0; n < particles.count(); ++n) {
    logits(particles.row(n), features, model, z);
    softmax(z);
    for (std::size_t c = 0; c < model.num_classes; ++c) avg[c] += z[c];
  }
  const double inv = 1.0 / static_cast<double>(particles.count());
  for (double& p : avg) p *= inv;
  return avg;
}

std::vector<Prediction> predict(const ParticleSet& particles, const AgentShard& test,
                                const ModelSpec& model) {
  require(!test.empty(), "test set is empty");
  std::vector<Prediction> out(test.size());
  const auto n = static_cast<std::ptrdiff_t>(test.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& ex = test.examples[static_cast<std::size_t>(i)];
    const Vector p = predictive_probabilities(particles, ex.features, model);
    std::size_t best = 0;
    for (std::size_t c = 1; c < p.size(); ++c)
      if (p[c] > p[best]) best = c;
    out[static_cast<std::size_t>(i)] = {best, p[best], best == ex.label};
  }
  return out;
}

double test_accuracy(const ParticleSet& particles, const AgentShard& test,
                     const ModelSpec& model) {
  const auto preds = predict(particles, test, model);
  std::size_t hits = 0;
  for (const auto& p : preds) hits += p.correct ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

Vector per_class_accuracy(const ParticleSet& particles, const AgentShard& test,
                          const ModelSpec& model) {
  const auto preds = predict(particles, test, model);
  std::vector<std::size_t> hits(model.num_classes, 0), totals(model.num_classes, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::size_t y = test.examples[i].label;
    ++totals[y];
    hits[y] += preds[i].correct ? 1 : 0;
  }
  Vector acc(model.num_classes, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < model.num_classes; ++c)
    if (totals[c] > 0) acc[c] = static_cast<double>(hits[c]) / static_cast<double>(totals[c]);
  return acc;
}

std::size_t ece_bin_index(double confidence, std::size_t num_bins) {
  const double m_real = static_cast<double>(num_bins);
  auto m = static_cast<std::size_t>(std::max(0.0, std::ceil(confidence * m_real) - 1.0));
  if (m >= num_bins) m = num_bins - 1;
  // Repair rounding in confidence * M against the exact boundaries m / M.
  while (m > 0 && confidence <= static_cast<double>(m) / m_real) --m;
  while (m + 1 < num_bins && confidence > static_cast<double>(m + 1) / m_real) ++m;
  return m;
}

EceReport expected_calibration_error(std::span<const Prediction> predictions,
                                     std::size_t num_bins) {
  require(num_bins >= 1, "ECE needs at least one bin");
  require(!predictions.empty(), "test set is empty");
  EceReport r{num_bins, std::vector<EceBin>(num_bins), 0.0};
  std::vector<double> hit_sum(num_bins, 0.0), conf_sum(num_bins, 0.0);
  for (const auto& p : predictions) {
    const std::size_t m = ece_bin_index(p.confidence, num_bins);
    ++r.bins[m].count;
    hit_sum[m] += p.correct ? 1.0 : 0.0;
    conf_sum[m] += p.confidence;
  }
  const double n = static_cast<double>(predictions.size());
  for (std::size_t m = 0; m < num_bins; ++m) {
    auto& b = r.bins[m];
    if (b.count == 0) continue;
    const double cnt = static_cast<double>(b.count);
    b.accuracy = hit_sum[m] / cnt;
    b.confidence = conf_sum[m] / cnt;
    r.ece += (cnt / n) * std::abs(b.accuracy - b.confidence);
  }
  return r;
}

EceReport expected_calibration_error(const ParticleSet& particles, const AgentShard& test,
                                     const ModelSpec& model, std::size_t num_bins) {
  require(num_bins >= 1, "ECE needs at least one bin");
  const auto preds = predict(particles, test, model);
  return expected_calibration_error(preds, num_bins);
}

}  // namespace cpfl
