#include "promptevo/testbed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "promptevo/errors.hpp"
#include "promptevo/rng.hpp"

namespace promptevo::testbed {

static_assert(std::endian::native == std::endian::little, "latent payloads assume a little-endian host");

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

} // namespace

Latent normalized(std::span<const double> v) {
  const double n = norm(v);
  Latent out(v.begin(), v.end());
  if (n > 0.0) {
    for (double& x : out) x /= n;
  }
  return out;
}

Latent default_anchor(const std::vector<Latent>& centers) {
  if (centers.empty()) {
    return {};
  }
  Latent centroid(centers.front().size(), 0.0);
  for (const auto& c : centers) {
    for (std::size_t k = 0; k < centroid.size() && k < c.size(); ++k) {
      centroid[k] += c[k];
    }
  }
  if (norm(centroid) > 1e-12) {
    return normalized(centroid);
  }
  return normalized(centers.front());
}

std::vector<std::string> TestbedSpec::validate() const {
  std::vector<std::string> issues;
  if (dim == 0) issues.push_back("dim must be >= 1");
  if (centers.empty()) issues.push_back("at least one center required");
  for (const auto& c : centers) {
    if (c.size() != dim) {
      issues.push_back("every center must have dim = " + std::to_string(dim) + " coordinates");
      break;
    }
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      if (centers[i] == centers[j]) {
        issues.push_back("centers " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
  if (!(sigma > 0.0)) issues.push_back("sigma must be > 0");
  if (prompt_anchor.size() != dim) {
    issues.push_back("prompt_anchor must have dim = " + std::to_string(dim) + " coordinates");
  } else if (std::abs(norm(prompt_anchor) - 1.0) > 1e-9) {
    issues.push_back("prompt_anchor must have unit norm");
  }
  if (!(strength >= 0.0 && strength <= 1.0)) issues.push_back("strength must be in [0, 1]");
  return issues;
}

TestbedSpec default_spec(std::size_t num_objectives, std::size_t dim) {
  if (num_objectives == 0) {
    throw UsageError("testbed needs at least one objective");
  }
  TestbedSpec spec;
  spec.dim = dim != 0 ? dim : std::max<std::size_t>(2, num_objectives);
  if (num_objectives >= 3 && spec.dim < num_objectives) {
    throw UsageError("default testbed with Q >= 3 needs dim >= Q");
  }
  if (num_objectives == 2) {
    Latent a(spec.dim, 0.0), b(spec.dim, 0.0);
    a[0] = 1.0;
    b[0] = -1.0;
    spec.centers = {a, b};
  } else if (num_objectives == 1) {
    Latent a(spec.dim, 0.0);
    a[0] = 1.0;
    spec.centers = {a};
  } else {
    for (std::size_t i = 0; i < num_objectives; ++i) {
      Latent c(spec.dim, 0.0);
      c[i] = std::sqrt(2.0);
      spec.centers.push_back(c);
    }
  }
  spec.prompt_anchor = default_anchor(spec.centers);
  return spec;
}

Bytes encode_latent(std::span<const double> z) {
  Bytes out(z.size() * sizeof(double));
  if (!z.empty()) {
    std::memcpy(out.data(), z.data(), out.size());
  }
  return out;
}

Latent decode_latent(std::span<const std::uint8_t> payload) {
  if (payload.size() % sizeof(double) != 0) {
    throw ProtocolError("testbed genotype payload is not a whole number of doubles");
  }
  Latent z(payload.size() / sizeof(double));
  if (!z.empty()) {
    std::memcpy(z.data(), payload.data(), payload.size());
  }
  return z;
}

Latent synth_generate(const TestbedSpec& spec, std::uint64_t seed) {
  SeedStream rng(seed);
  Latent z(spec.dim);
  for (double& x : z) x = rng.next_normal();
  return z;
}

Latent synth_mutate(const TestbedSpec& spec, std::span<const double> parent, std::uint64_t seed) {
  if (parent.size() != spec.dim) {
    throw ProtocolError("testbed parent latent has the wrong dimension");
  }
  const double s = spec.strength;
  if (s == 0.0) {
    return Latent(parent.begin(), parent.end());
  }
  const double keep = std::sqrt(1.0 - s * s);
  SeedStream rng(seed);
  Latent child(spec.dim);
  for (std::size_t k = 0; k < spec.dim; ++k) {
    child[k] = keep * parent[k] + s * rng.next_normal();
  }
  return child;
}

std::vector<double> synth_classify(const TestbedSpec& spec, std::span<const double> z) {
  std::vector<double> y;
  y.reserve(spec.centers.size());
  const double two_sigma2 = 2.0 * spec.sigma * spec.sigma;
  for (const auto& c : spec.centers) {
    y.push_back(std::exp(-squared_distance(z, c) / two_sigma2));
  }
  return y;
}

double synth_similarity(const TestbedSpec& spec, std::span<const double> z) {
  const double n = norm(z);
  if (n == 0.0) {
    return 0.0;
  }
  double dot = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) dot += z[k] * spec.prompt_anchor[k];
  return std::clamp(dot / n, -1.0, 1.0);
}

std::vector<Latent> known_pareto_set(const TestbedSpec& spec, std::size_t resolution) {
  if (spec.centers.size() != 2) {
    throw UsageError("known_pareto_set: closed form only for Q = 2 testbeds");
  }
  if (resolution < 2) {
    throw UsageError("known_pareto_set: resolution must be >= 2");
  }
  const auto& a = spec.centers[0];
  const auto& b = spec.centers[1];
  std::vector<Latent> points;
  points.reserve(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(resolution - 1);
    Latent z(spec.dim);
    for (std::size_t k = 0; k < spec.dim; ++k) z[k] = a[k] + t * (b[k] - a[k]);
    points.push_back(std::move(z));
  }
  return points;
}

std::vector<std::vector<double>> known_pareto_front(const TestbedSpec& spec, std::size_t resolution) {
  std::vector<std::vector<double>> front;
  for (const auto& z : known_pareto_set(spec, resolution)) {
    front.push_back(synth_classify(spec, z));
  }
  return front;
}

std::string phenotype_id_for(std::span<const std::uint8_t> payload) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string id = "tb:";
  id.reserve(3 + 2 * payload.size());
  for (auto b : payload) {
    id.push_back(digits[b >> 4]);
    id.push_back(digits[b & 0xF]);
  }
  return id;
}

Latent latent_from_phenotype(const PhenotypeRef& phenotype, std::size_t dim) {
  const auto& id = phenotype.id();
  if (id.rfind("tb:", 0) != 0 || (id.size() - 3) != dim * sizeof(double) * 2) {
    throw ProtocolError("not a testbed phenotype id of dimension " + std::to_string(dim) + ": " + id);
  }
  auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    throw ProtocolError("malformed testbed phenotype id: " + id);
  };
  Bytes payload((id.size() - 3) / 2);
  for (std::size_t i = 0; i < payload.size(); ++i) {
    payload[i] = static_cast<std::uint8_t>((nibble(id[3 + 2 * i]) << 4) | nibble(id[4 + 2 * i]));
  }
  return decode_latent(payload);
}

TestbedWorker::TestbedWorker(TestbedSpec spec) : spec_(std::move(spec)) {
  if (auto issues = spec_.validate(); !issues.empty()) {
    throw UsageError("invalid testbed spec: " + issues.front());
  }
}

Generated TestbedWorker::generate(const std::string& /*prompt*/, std::uint64_t seed) {
  auto payload = encode_latent(synth_generate(spec_, seed));
  auto id = phenotype_id_for(payload);
  return {std::move(payload), PhenotypeRef(std::move(id))};
}

Generated TestbedWorker::mutate(const std::string& /*prompt*/, const Genotype& parent,
                                std::uint64_t seed, double strength) {
  if (!(strength >= 0.0 && strength <= 1.0)) {
    throw ProtocolError("mutation strength must be in [0, 1]");
  }
  if (strength == 0.0) {
    return {parent.payload, PhenotypeRef(phenotype_id_for(parent.payload))};
  }
  auto local = spec_;
  local.strength = strength;
  auto payload = encode_latent(synth_mutate(local, decode_latent(parent.payload), seed));
  auto id = phenotype_id_for(payload);
  return {std::move(payload), PhenotypeRef(std::move(id))};
}

std::vector<double> TestbedWorker::evaluate(const PhenotypeRef& phenotype,
                                            const std::vector<std::string>& labels) {
  if (labels.size() != spec_.num_objectives()) {
    throw UsageError("testbed scores " + std::to_string(spec_.num_objectives()) + " labels, got " +
                     std::to_string(labels.size()));
  }
  return synth_classify(spec_, latent_from_phenotype(phenotype, spec_.dim));
}

double TestbedWorker::embed_similarity(const PhenotypeRef& phenotype, const std::string& /*prompt*/) {
  return synth_similarity(spec_, latent_from_phenotype(phenotype, spec_.dim));
}

} // namespace promptevo::testbed
