#include "sinterbench/measurement.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "sinterbench/errors.hpp"

namespace sinterbench {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<double> parse_numbers(std::string_view text, std::string_view context) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string token(text.substr(0, comma));
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) {
      throw ConfigError("cannot parse number '" + token + "' in noise spec '" +
                        std::string(context) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Substream Substream::derive(std::uint64_t seed, std::uint64_t index, SeedDomain domain) {
  const auto tag = static_cast<std::uint64_t>(domain);
  return Substream(mix64(mix64(seed ^ mix64(tag)) + mix64(index ^ 0x5bd1e995ull)));
}

NoiseModel parse_noise(std::string_view text) {
  if (text == "none") return NoNoise{};
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("noise spec '" + std::string(text) +
                      "' must be none, gaussian:mu,sigma or uniform:a,b");
  }
  const auto kind = text.substr(0, colon);
  const auto values = parse_numbers(text.substr(colon + 1), text);
  if (values.size() != 2) {
    throw ConfigError("noise spec '" + std::string(text) + "' needs exactly two numbers");
  }
  NoiseModel model;
  if (kind == "gaussian") {
    model = GaussianNoise{values[0], values[1]};
  } else if (kind == "uniform") {
    model = UniformNoise{values[0], values[1]};
  } else {
    throw ConfigError("unknown noise kind '" + std::string(kind) + "'");
  }
  validate(model);
  return model;
}

void validate(const NoiseModel& model) {
  std::visit(Overloaded{
                 [](const NoNoise&) {},
                 [](const GaussianNoise& g) {
                   if (!std::isfinite(g.mu) || !(g.sigma > 0) || !std::isfinite(g.sigma)) {
                     throw ConfigError("gaussian noise needs finite mu and sigma > 0");
                   }
                 },
                 [](const UniformNoise& u) {
                   if (!std::isfinite(u.a) || !std::isfinite(u.b) || !(u.a < u.b)) {
                     throw ConfigError("uniform noise needs finite a < b");
                   }
                 },
             },
             model);
}

std::string to_string(const NoiseModel& model) {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{
                 [&](const NoNoise&) { out << "none"; },
                 [&](const GaussianNoise& g) { out << "gaussian:" << g.mu << ',' << g.sigma; },
                 [&](const UniformNoise& u) { out << "uniform:" << u.a << ',' << u.b; },
             },
             model);
  return out.str();
}

std::string noise_kind(const NoiseModel& model) {
  return std::visit(Overloaded{
                        [](const NoNoise&) { return std::string("none"); },
                        [](const GaussianNoise&) { return std::string("gaussian"); },
                        [](const UniformNoise&) { return std::string("uniform"); },
                    },
                    model);
}

NoiseSampler::NoiseSampler(const NoiseModel& model, Substream stream)
    : model_(model), stream_(stream) {
  if (const auto* g = std::get_if<GaussianNoise>(&model_)) {
    normal_ = std::normal_distribution<double>(g->mu, g->sigma);
  } else if (const auto* u = std::get_if<UniformNoise>(&model_)) {
    uniform_ = std::uniform_real_distribution<double>(u->a, u->b);
  }
}

double NoiseSampler::operator()() {
  switch (model_.index()) {
    case 1:
      return normal_(stream_);
    case 2:
      return uniform_(stream_);
    default:
      return 0.0;
  }
}

double sample(const NoiseModel& model, Substream& stream) {
  return std::visit(Overloaded{
                        [](const NoNoise&) { return 0.0; },
                        [&](const GaussianNoise& g) {
                          return std::normal_distribution<double>(g.mu, g.sigma)(stream);
                        },
                        [&](const UniformNoise& u) {
                          return std::uniform_real_distribution<double>(u.a, u.b)(stream);
                        },
                    },
                    model);
}

}  // namespace sinterbench
