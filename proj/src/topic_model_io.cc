#include <cmath>
#include <fstream>
#include <sstream>

#include "grice/error.h"
#include "grice/topics.h"
#include "json.hpp"

namespace grice {

namespace {

using nlohmann::json;

void check_rows(const std::vector<Distribution>& rows, std::size_t width,
                const char* what) {
  for (const auto& row : rows) {
    if (row.size() != width) {
      throw Error(ErrorCode::DimensionMismatch,
                  std::string(what) + " row has the wrong width");
    }
    double sum = 0;
    for (double x : row) sum += x;
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::NotNormalized,
                  std::string(what) + " row does not sum to 1");
    }
  }
}

}  // namespace

std::string dump_topic_model(const TopicModel& model) {
  json doc;
  doc["config"] = {{"topics", model.config.topics},
                   {"alpha", model.config.alpha},
                   {"beta", model.config.beta},
                   {"sweeps", model.config.sweeps},
                   {"burn_in", model.config.burn_in},
                   {"seed", model.config.seed}};
  doc["vocabulary"] = model.vocabulary.tokens();
  doc["phi"] = model.phi;
  doc["thetaTrain"] = model.theta_train;
  return doc.dump() + "\n";
}

TopicModel parse_topic_model(std::string_view json_text) {
  try {
    json doc = json::parse(json_text);
    TopicModel model;
    const auto& c = doc.at("config");
    model.config.topics = c.at("topics").get<int>();
    model.config.alpha = c.at("alpha").get<double>();
    model.config.beta = c.at("beta").get<double>();
    model.config.sweeps = c.at("sweeps").get<int>();
    model.config.burn_in = c.at("burn_in").get<int>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.config.validate();
    model.vocabulary =
        Vocabulary(doc.at("vocabulary").get<std::vector<std::string>>());
    model.phi = doc.at("phi").get<std::vector<Distribution>>();
    model.theta_train = doc.at("thetaTrain").get<std::vector<Distribution>>();
    if (model.phi.size() != static_cast<std::size_t>(model.config.topics)) {
      throw Error(ErrorCode::DimensionMismatch, "phi has the wrong topic count");
    }
    check_rows(model.phi, model.vocabulary.size(), "phi");
    check_rows(model.theta_train, model.phi.size(), "thetaTrain");
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ModelMissing,
                std::string("malformed topic model: ") + e.what());
  }
}

void save_topic_model(const TopicModel& model,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << dump_topic_model(model);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

TopicModel load_topic_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::ModelMissing, "cannot read topic model " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_topic_model(buf.str());
}

}  // namespace grice
