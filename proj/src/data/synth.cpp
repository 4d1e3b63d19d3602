#include "ltn/data/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "ltn/data/kdd.hpp"
#include "ltn/error.hpp"

namespace ltn {

namespace {

// Cluster centres are fixed so every seed samples the same problem.
constexpr std::uint64_t kCentreSeed = 0x5eed0c1u;

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& values, const std::vector<double>& weights) {
  std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
  return values[d(rng)];
}

std::vector<std::vector<double>> centres(std::size_t classes, std::size_t dims, double lo, double hi) {
  std::mt19937_64 rng(kCentreSeed + classes * 131 + dims);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> out(classes, std::vector<double>(dims));
  for (auto& c : out) {
    for (auto& v : c) v = u(rng);
  }
  return out;
}

// Integer counts proportional to `weights` summing to n (largest remainder).
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(n) * weights[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    used += counts[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; used < n; ++i, ++used) ++counts[rem[i % rem.size()].second];
  return counts;
}

DatasetTable protocol_flags(std::size_t n, std::uint64_t seed) {
  DatasetTable t{synth_schema(SynthKind::ProtocolFlags), {}};
  std::mt19937_64 rng(seed);
  const std::vector<std::string> protocols{"udp", "tcp", "icmp"};
  const std::vector<double> protocol_weights{0.75, 0.15, 0.10};
  const std::vector<std::string> tcp_flags{"S1", "REJ", "S2", "S0", "S3", "RSTO", "RSTR", "RSTOS0", "OTH", "SH"};
  std::exponential_distribution<double> duration(0.1);
  std::lognormal_distribution<double> bytes(6.0, 1.5);
  std::uniform_int_distribution<std::size_t> flag(0, tcp_flags.size() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& proto = pick(rng, protocols, protocol_weights);
    const std::string f = proto == "tcp" ? tcp_flags[flag(rng)] : "SF";
    t.rows.push_back({Cell{std::round(duration(rng))}, Cell{proto}, Cell{f}, Cell{std::round(bytes(rng))},
                      Cell{std::round(bytes(rng))}});
  }
  return t;
}

DatasetTable attack_categories(std::size_t n, std::uint64_t seed) {
  DatasetTable t{synth_schema(SynthKind::AttackCategories), {}};
  const auto& cats = kdd_categories();  // normal, DOS, probe, R2L, U2R
  const std::vector<double> weights{0.50, 0.28, 0.12, 0.07, 0.03};
  const std::size_t dims = 8;
  const auto mu = centres(cats.size(), dims, 0.0, 10.0);

  std::vector<std::vector<std::string>> names(cats.size());
  for (const auto& [label, cat] : kdd_label_table()) {
    if (label == "portseep") continue;
    for (std::size_t c = 0; c < cats.size(); ++c) {
      if (cats[c] == cat) names[c].push_back(label);
    }
  }
  const std::vector<std::vector<std::string>> protocols{
      {"tcp", "udp", "icmp"}, {"icmp", "tcp"}, {"tcp", "icmp", "udp"}, {"tcp"}, {"tcp"}};
  const std::vector<std::vector<double>> protocol_weights{{0.7, 0.2, 0.1}, {0.6, 0.4}, {0.5, 0.3, 0.2}, {1}, {1}};
  const std::vector<std::string> flags{"SF", "S0", "REJ", "RSTO", "SH"};
  const std::vector<std::vector<double>> flag_weights{
      {0.95, 0.01, 0.02, 0.01, 0.01}, {0.5, 0.4, 0.1, 0, 0}, {0.4, 0.2, 0.2, 0.1, 0.1}, {0.9, 0, 0, 0.1, 0}, {1, 0, 0, 0, 0}};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!t.rows.empty() && u(rng) < 0.01) {
      t.rows.push_back(t.rows.back());
      continue;
    }
    std::discrete_distribution<std::size_t> cls(weights.begin(), weights.end());
    const std::size_t c = cls(rng);
    std::vector<Cell> row;
    for (std::size_t d = 0; d < dims; ++d) row.emplace_back(mu[c][d] + noise(rng));
    row.emplace_back(pick(rng, protocols[c], protocol_weights[c]));
    row.emplace_back(pick(rng, flags, flag_weights[c]));
    std::uniform_int_distribution<std::size_t> which(0, names[c].size() - 1);
    std::string label = names[c][which(rng)];
    if (u(rng) < 0.2) label += ".";
    if (u(rng) < 0.005) row[static_cast<std::size_t>(u(rng) * dims)] = u(rng) < 0.5 ? INFINITY : NAN;
    row.emplace_back(std::move(label));
    t.rows.push_back(std::move(row));
  }
  return t;
}

DatasetTable three_class(std::size_t n, std::uint64_t seed) {
  DatasetTable t{synth_schema(SynthKind::ThreeClass), {}};
  const std::vector<std::string> labels{"BENIGN", "DDoS", "PortScan"};
  const auto counts = apportion(n, {57305, 212718, 128005});
  const std::size_t dims = t.schema.size() - 1;
  const auto mu = centres(labels.size(), dims, 0.0, 10.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.5);
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < labels.size(); ++c) order.insert(order.end(), counts[c], c);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t c : order) {
    std::vector<Cell> row;
    for (std::size_t d = 0; d < dims; ++d) row.emplace_back(mu[c][d] + noise(rng));
    row.emplace_back(labels[c]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

DatasetTable beam_rfs(std::size_t n, std::uint64_t seed) {
  DatasetTable t{synth_schema(SynthKind::BeamRfs), {}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.003);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pos(rng);
    std::vector<Cell> row;
    for (int mode = 1; mode <= 8; ++mode) {
      const double shape = 0.5 * (1.0 + std::cos(mode * std::numbers::pi * x + 0.35 * mode));
      row.emplace_back(shape * (1.0 - 0.3 * x) + noise(rng));
    }
    row.emplace_back(x);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

std::string to_string(SynthKind k) {
  switch (k) {
    case SynthKind::ProtocolFlags: return "protocol_flags";
    case SynthKind::AttackCategories: return "attack_categories";
    case SynthKind::ThreeClass: return "three_class";
    case SynthKind::BeamRfs: return "beam_rfs";
  }
  return "?";
}

SynthKind synth_kind_from_string(const std::string& s) {
  for (auto k : {SynthKind::ProtocolFlags, SynthKind::AttackCategories, SynthKind::ThreeClass, SynthKind::BeamRfs}) {
    if (to_string(k) == s) return k;
  }
  throw DataError("unknown synthetic data kind '" + s +
                  "' (expected protocol_flags, attack_categories, three_class or beam_rfs)");
}

Schema synth_schema(SynthKind kind) {
  const auto num = ColumnKind::Numeric;
  const auto cat = ColumnKind::Categorical;
  const auto lab = ColumnKind::Label;
  switch (kind) {
    case SynthKind::ProtocolFlags:
      return {{{"duration", num}, {"protocol_type", cat}, {"flag", cat}, {"src_bytes", num}, {"dst_bytes", num}}};
    case SynthKind::AttackCategories:
      return {{{"duration", num},
               {"src_bytes", num},
               {"dst_bytes", num},
               {"count", num},
               {"srv_count", num},
               {"serror_rate", num},
               {"same_srv_rate", num},
               {"dst_host_count", num},
               {"protocol_type", cat},
               {"flag", cat},
               {"label", lab}}};
    case SynthKind::ThreeClass: {
      Schema s;
      for (const char* name :
           {"Destination Port", "Flow Duration", "Total Fwd Packets", "Total Backward Packets",
            "Total Length of Fwd Packets", "Total Length of Bwd Packets", "Fwd Packet Length Max",
            "Fwd Packet Length Mean", "Bwd Packet Length Max", "Bwd Packet Length Mean", "Flow Bytes/s",
            "Flow Packets/s", "Flow IAT Mean", "Flow IAT Std", "Fwd IAT Mean", "Bwd IAT Mean", "SYN Flag Count",
            "ACK Flag Count", "Average Packet Size"}) {
        s.columns.push_back({name, num});
      }
      s.columns.push_back({"Label", lab});
      return s;
    }
    case SynthKind::BeamRfs: {
      Schema s;
      for (int i = 1; i <= 8; ++i) s.columns.push_back({"rfs" + std::to_string(i), num});
      s.columns.push_back({"position", lab});
      return s;
    }
  }
  throw DataError("unknown synthetic data kind");
}

DatasetTable synth_generate(SynthKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 10) throw DataError("synthetic data needs at least 10 rows");
  switch (kind) {
    case SynthKind::ProtocolFlags: return protocol_flags(n, seed);
    case SynthKind::AttackCategories: return attack_categories(n, seed);
    case SynthKind::ThreeClass: return three_class(n, seed);
    case SynthKind::BeamRfs: return beam_rfs(n, seed);
  }
  throw DataError("unknown synthetic data kind");
}

}  // namespace ltn
