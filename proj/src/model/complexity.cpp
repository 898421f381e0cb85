#include "ssmgan/model/complexity.hpp"

#include <algorithm>

namespace ssmgan::model {

MacReport mac_count(const GeneratorConfig& config) {
  MacReport report;
  const auto plan = upsampler_plan(config);
  std::size_t up = 0;
  for (std::size_t b = 0; b < config.rate_schedule.size(); ++b) {
    const std::uint64_t rate = config.rate_schedule[b];
    if (plan[b]) {
      const auto per = upsampler_macs_per_sample(config.hidden_channels, config.kernel_size);
      report.layers.push_back({"upsample" + std::to_string(up++), rate, per, per * rate});
    }
    const auto per = resblock_macs_per_sample(config.cond_channels, config.hidden_channels, config.kernel_size);
    report.layers.push_back({"block" + std::to_string(b), rate, per, per * rate});
  }
  for (const auto& l : report.layers) report.total += l.macs_per_second;
  return report;
}

MacReport structural_mac_count(const Generator& g) {
  MacReport report;
  const auto& cfg = g.config();
  const std::uint64_t frame_rate = cfg.frame_rate();
  report.layers.push_back({"prior", frame_rate, g.embedding().cols(), g.embedding().cols() * frame_rate});
  report.layers.push_back(
      {"cond_head", frame_rate, g.cond_head().macs_per_step(), g.cond_head().macs_per_step() * frame_rate});
  for (std::size_t b = 0; b < g.stages().size(); ++b) {
    const auto& stage = g.stages()[b];
    if (stage.upsampler) {
      const auto per = g.upsamplers()[*stage.upsampler].conv.macs_per_step();
      report.layers.push_back({"upsample" + std::to_string(*stage.upsampler), stage.rate, per, per * stage.rate});
    }
    const auto per = stage.block.macs_per_sample();
    report.layers.push_back({"block" + std::to_string(b), stage.rate, per, per * stage.rate});
  }
  const std::uint64_t band_rate = cfg.band_rate();
  report.layers.push_back(
      {"output", band_rate, g.output_conv().macs_per_step(), g.output_conv().macs_per_step() * band_rate});
  const std::uint64_t pqmf_per = (g.pqmf().synthesis_history() + 1) * g.pqmf().bands();
  report.layers.push_back({"pqmf", cfg.sample_rate, pqmf_per, pqmf_per * cfg.sample_rate});
  for (const auto& l : report.layers) report.total += l.macs_per_second;
  return report;
}

ParamReport param_count(const WeightStore& weights) {
  ParamReport report;
  if (weights.empty()) return report;
  for (const auto& spec : required_tensors(weights.config())) {
    if (!weights.contains(spec.name)) continue;
    const auto n = weights.tensors().at(spec.name).size();
    auto it = std::find_if(report.modules.begin(), report.modules.end(),
                           [&](const ModuleParams& m) { return m.module == spec.module; });
    if (it == report.modules.end()) {
      report.modules.push_back({spec.module, n});
    } else {
      it->count += n;
    }
    report.total += n;
  }
  return report;
}

}  // namespace ssmgan::model
