#include "mlc/relations.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <thread>

#include <json.hpp>

#include "mlc/error.hpp"
#include "mlc/rng.hpp"

namespace mlc {
namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 14> kLinkIds{
    // Hamming vs subset
    "Lh01(sgn)<=Ls01(sgn)",
    "Ls01(sgn)<=Ls",
    "Ls01(sgn)<=c*Lh01(sgn)",
    "c*Lh01(sgn)<=c*Lh",
    // Hamming vs ranking
    "Lr01<=c*Lh01(sgn)",
    "c*Lh01(sgn)<=c*Lh[ranking]",
    "Lh01(t*)<=c*Lr01",
    "c*Lr01<=c*Lr",
    "Lr01<=(c/min)*Lh01(sgn)",
    "Lh01(t*)<=max*Lr01",
    // Subset vs ranking
    "Lr01<=Ls01(sgn)",
    "Ls01(sgn)<=Ls[ranking]",
    "Ls01(t*)<=c^2*Lr01",
    "c^2*Lr01<=c^2*Lr",
};

constexpr std::size_t kBlockSize = 4096;

RelationVerdict verdict(std::string_view id, double lhs, double rhs) {
  const double slack = rhs - lhs;
  return {id, lhs, rhs, slack, slack >= kSlackTolerance};
}

void require_dominating(const RelationCase& rc, const CheckOptions& opt) {
  if (!rc.loss.dominates_zero_one() && !opt.allow_non_dominating)
    throw InvalidInput(std::string("base loss '") + std::string(to_string(rc.loss.kind)) +
                       "' does not upper-bound the 0/1 loss; surrogate links are not valid for it");
}

struct BlockResult {
  std::size_t cases = 0;
  std::size_t ranking_degenerate = 0;
  std::array<LinkStats, kLinkIds.size()> links{};
  double max_subset_ratio = 0.0;
  double max_hamming_ratio = 0.0;
  std::vector<CampaignFailure> failures;
};

void absorb(BlockResult& block, const std::vector<RelationVerdict>& verdicts, std::size_t offset,
            std::vector<std::string>& violated) {
  for (std::size_t k = 0; k < verdicts.size(); ++k) {
    LinkStats& s = block.links[offset + k];
    const RelationVerdict& v = verdicts[k];
    ++s.checked;
    s.min_slack = s.min_slack ? std::min(*s.min_slack, v.slack) : v.slack;
    if (!v.holds) {
      ++s.violations;
      violated.emplace_back(v.id);
    }
  }
}

double draw_score(Rng& rng, ScoreDistribution dist, std::size_t mode) {
  if (dist == ScoreDistribution::normal || mode < 2) return rng.normal();
  if (mode == 2) {
    static constexpr std::array grid{-1.0, -0.5, 0.0, 0.5, 1.0};
    return grid[rng.below(grid.size())];
  }
  static constexpr std::array edge{0.0, -0.0, 1e-300, -1e-300, 1.0, -1.0, 1.0 + 0x1p-52, 1.0 - 0x1p-53};
  return edge[rng.below(edge.size())];
}

BlockResult run_block(const CampaignConfig& config, std::size_t block) {
  BlockResult out;
  for (std::size_t k = 0; k < kLinkIds.size(); ++k) out.links[k].id = kLinkIds[k];
  Rng rng(derive_seed(config.seed, block));
  const std::size_t first = block * kBlockSize;
  const std::size_t last = std::min(config.cases, first + kBlockSize);
  const CheckOptions opt{config.allow_non_dominating};
  const std::size_t span = config.c_max - config.c_min + 1;
  for (std::size_t index = first; index < last; ++index) {
    const std::size_t c = config.c_min + rng.below(span);
    const std::size_t mode = rng.below(4);
    std::vector<Label> y(c);
    for (auto& v : y) v = (rng.next() >> 63) ? Label{1} : Label{-1};
    std::vector<double> f(c);
    for (auto& v : f) v = draw_score(rng, config.scores, mode);
    const RelationCase rc = RelationCase::make(std::move(f), LabelVector(std::move(y)), config.loss);

    std::vector<std::string> violated;
    absorb(out, check_hamming_subset(rc, opt), 0, violated);
    if (auto hr = check_hamming_ranking(rc, opt)) {
      absorb(out, *hr, 4, violated);
      absorb(out, *check_subset_ranking(rc, opt), 10, violated);
      if (*rc.ranking01 > 0.0) {
        const double cd = static_cast<double>(c);
        out.max_subset_ratio = std::max(out.max_subset_ratio, rc.subset01_oracle / *rc.ranking01 / (cd * cd));
        const double mx = static_cast<double>(std::max(rc.num_relevant, rc.num_irrelevant));
        out.max_hamming_ratio = std::max(out.max_hamming_ratio, rc.hamming01_oracle / *rc.ranking01 / mx);
      }
    } else {
      ++out.ranking_degenerate;
    }
    ++out.cases;
    if (!violated.empty() && out.failures.size() < config.max_failures_kept)
      out.failures.push_back({index, rc, std::move(violated)});
  }
  return out;
}

json number_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json labels_json(LabelView y) {
  json arr = json::array();
  for (Label v : y) arr.push_back(static_cast<int>(v));
  return arr;
}

}  // namespace

RelationCase RelationCase::make(std::vector<double> f, LabelVector y, BaseLoss loss) {
  if (f.size() != y.size()) throw DimensionError("scores and labels differ in length");
  if (y.size() == 0) throw InvalidInput("empty label vector");
  RelationCase rc;
  rc.f = std::move(f);
  rc.y = std::move(y);
  rc.loss = loss;
  rc.sign_prediction = classify_sign(rc.f);
  OracleThreshold oracle = oracle_threshold(rc.f, rc.y);
  rc.oracle_prediction = std::move(oracle.prediction);
  rc.num_relevant = rc.y.num_relevant();
  rc.num_irrelevant = rc.y.size() - rc.num_relevant;
  rc.hamming01_sign = hamming_loss_01(rc.sign_prediction, rc.y);
  rc.subset01_sign = subset_loss_01(rc.sign_prediction, rc.y);
  rc.hamming01_oracle = hamming_loss_01(rc.oracle_prediction, rc.y);
  rc.subset01_oracle = subset_loss_01(rc.oracle_prediction, rc.y);
  rc.ranking01 = ranking_loss_01(rc.f, rc.y);
  rc.hamming_surrogate = surrogate_hamming(rc.f, rc.y, loss);
  rc.subset_surrogate = surrogate_subset(rc.f, rc.y, loss);
  rc.ranking_surrogate = surrogate_ranking(rc.f, rc.y, loss);
  return rc;
}

bool RelationCase::consistent() const {
  const RelationCase fresh = make(f, y, loss);
  return fresh.sign_prediction == sign_prediction && fresh.oracle_prediction == oracle_prediction &&
         fresh.num_relevant == num_relevant && fresh.num_irrelevant == num_irrelevant &&
         fresh.hamming01_sign == hamming01_sign && fresh.subset01_sign == subset01_sign &&
         fresh.hamming01_oracle == hamming01_oracle && fresh.subset01_oracle == subset01_oracle &&
         fresh.ranking01 == ranking01 && fresh.hamming_surrogate == hamming_surrogate &&
         fresh.subset_surrogate == subset_surrogate && fresh.ranking_surrogate == ranking_surrogate;
}

std::vector<RelationVerdict> check_hamming_subset(const RelationCase& rc, const CheckOptions& opt) {
  require_dominating(rc, opt);
  const double c = static_cast<double>(rc.c());
  return {
      verdict(kLinkIds[0], rc.hamming01_sign, rc.subset01_sign),
      verdict(kLinkIds[1], rc.subset01_sign, rc.subset_surrogate),
      verdict(kLinkIds[2], rc.subset01_sign, c * rc.hamming01_sign),
      verdict(kLinkIds[3], c * rc.hamming01_sign, c * rc.hamming_surrogate),
  };
}

std::optional<std::vector<RelationVerdict>> check_hamming_ranking(const RelationCase& rc,
                                                                  const CheckOptions& opt) {
  require_dominating(rc, opt);
  if (rc.ranking_degenerate()) return std::nullopt;
  const double c = static_cast<double>(rc.c());
  const double r01 = *rc.ranking01;
  const double mn = static_cast<double>(std::min(rc.num_relevant, rc.num_irrelevant));
  const double mx = static_cast<double>(std::max(rc.num_relevant, rc.num_irrelevant));
  return std::vector<RelationVerdict>{
      verdict(kLinkIds[4], r01, c * rc.hamming01_sign),
      verdict(kLinkIds[5], c * rc.hamming01_sign, c * rc.hamming_surrogate),
      verdict(kLinkIds[6], rc.hamming01_oracle, c * r01),
      verdict(kLinkIds[7], c * r01, c * *rc.ranking_surrogate),
      verdict(kLinkIds[8], r01, c / mn * rc.hamming01_sign),
      verdict(kLinkIds[9], rc.hamming01_oracle, mx * r01),
  };
}

std::optional<std::vector<RelationVerdict>> check_subset_ranking(const RelationCase& rc,
                                                                 const CheckOptions& opt) {
  require_dominating(rc, opt);
  if (rc.ranking_degenerate()) return std::nullopt;
  const double c2 = static_cast<double>(rc.c()) * static_cast<double>(rc.c());
  const double r01 = *rc.ranking01;
  return std::vector<RelationVerdict>{
      verdict(kLinkIds[10], r01, rc.subset01_sign),
      verdict(kLinkIds[11], rc.subset01_sign, rc.subset_surrogate),
      verdict(kLinkIds[12], rc.subset01_oracle, c2 * r01),
      verdict(kLinkIds[13], c2 * r01, c2 * *rc.ranking_surrogate),
  };
}

std::span<const std::string_view> relation_link_ids() noexcept { return kLinkIds; }

ScoreDistribution parse_score_distribution(std::string_view name) {
  if (name == "normal") return ScoreDistribution::normal;
  if (name == "mixed") return ScoreDistribution::mixed;
  throw InvalidInput("unknown score distribution '" + std::string(name) + "'");
}

std::string_view to_string(ScoreDistribution d) noexcept {
  return d == ScoreDistribution::normal ? "normal" : "mixed";
}

CampaignSummary fuzz_campaign(const CampaignConfig& config) {
  if (config.c_min < 1 || config.c_max < config.c_min) throw InvalidInput("invalid label-count range");
  if (!config.loss.dominates_zero_one() && !config.allow_non_dominating)
    throw InvalidInput("base loss '" + std::string(to_string(config.loss.kind)) +
                       "' does not upper-bound the 0/1 loss; pass allow_non_dominating to run anyway");
  const std::size_t blocks = (config.cases + kBlockSize - 1) / kBlockSize;
  std::vector<BlockResult> results(blocks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) results[b] = run_block(config, b);
  };
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(blocks, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  CampaignSummary summary;
  summary.config = config;
  summary.links.resize(kLinkIds.size());
  for (std::size_t k = 0; k < kLinkIds.size(); ++k) summary.links[k].id = kLinkIds[k];
  for (BlockResult& r : results) {
    summary.cases += r.cases;
    summary.ranking_degenerate += r.ranking_degenerate;
    summary.max_subset_oracle_ratio = std::max(summary.max_subset_oracle_ratio, r.max_subset_ratio);
    summary.max_hamming_oracle_ratio = std::max(summary.max_hamming_oracle_ratio, r.max_hamming_ratio);
    for (std::size_t k = 0; k < kLinkIds.size(); ++k) {
      LinkStats& dst = summary.links[k];
      const LinkStats& src = r.links[k];
      dst.checked += src.checked;
      dst.violations += src.violations;
      summary.violations += src.violations;
      if (src.min_slack) dst.min_slack = dst.min_slack ? std::min(*dst.min_slack, *src.min_slack) : src.min_slack;
    }
    for (auto& f : r.failures)
      if (summary.failures.size() < config.max_failures_kept) summary.failures.push_back(std::move(f));
  }
  return summary;
}

std::string CampaignSummary::to_json() const {
  json cfg = {
      {"cases", config.cases},
      {"c_min", config.c_min},
      {"c_max", config.c_max},
      {"score_distribution", to_string(config.scores)},
      {"seed", config.seed},
      {"base_loss", to_string(config.loss.kind)},
      {"allow_non_dominating", config.allow_non_dominating},
      {"slack_tolerance", kSlackTolerance},
  };
  json links_json = json::array();
  for (const LinkStats& s : links)
    links_json.push_back({{"id", s.id},
                          {"checked", s.checked},
                          {"violations", s.violations},
                          {"min_slack", number_or_null(s.min_slack)}});
  json failures_json = json::array();
  for (const CampaignFailure& f : failures)
    failures_json.push_back({{"case_index", f.case_index},
                             {"violated", f.violated},
                             {"case", json::parse(relation_case_to_json(f.rc))}});
  json out = {
      {"config", cfg},
      {"cases", cases},
      {"violations", violations},
      {"ranking_degenerate", ranking_degenerate},
      {"links", links_json},
      {"max_subset_oracle_ratio_over_c2", max_subset_oracle_ratio},
      {"max_hamming_oracle_ratio_over_max_card", max_hamming_oracle_ratio},
      {"failures", failures_json},
  };
  return out.dump(2);
}

std::string relation_case_to_json(const RelationCase& rc) {
  json out = {{"f", rc.f}, {"y", labels_json(rc.y)}, {"base_loss", to_string(rc.loss.kind)}};
  return out.dump();
}

RelationCase relation_case_from_json(const std::string& text) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("relation case: ") + e.what());
  }
  if (!in.contains("f") || !in.contains("y")) throw InvalidInput("relation case needs 'f' and 'y'");
  std::vector<double> f = in.at("f").get<std::vector<double>>();
  std::vector<Label> y;
  for (int v : in.at("y").get<std::vector<int>>()) y.push_back(static_cast<Label>(v));
  const BaseLoss loss = parse_base_loss(in.value("base_loss", std::string("hinge")));
  return RelationCase::make(std::move(f), LabelVector(std::move(y)), loss);
}

}  // namespace mlc
