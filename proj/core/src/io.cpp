#include "stripe/io.hpp"

#include <stdexcept>

namespace stripe {

using nlohmann::json;

json spectrum_to_json(const RiskSpectrum& spectrum) {
  json out = json::array();
  const auto bp = spectrum.breakpoints();
  const auto jumps = spectrum.jumps();
  for (std::size_t i = 0; i < bp.size(); ++i) out.push_back(json::array({bp[i], jumps[i]}));
  return out;
}

RiskSpectrum spectrum_from_json(const json& record) {
  if (record.is_object()) {
    const std::string kind = record.at("kind").get<std::string>();
    if (kind == "flat") return RiskSpectrum::flat();
    if (kind == "avar") return average_value_at_risk_spectrum(record.at("level").get<double>());
    if (kind == "semideviation") {
      return mean_semideviation_spectrum(record.at("theta").get<double>(),
                                         record.at("kappa").get<double>());
    }
    throw std::invalid_argument("unknown spectrum kind '" + kind + "'");
  }
  if (!record.is_array()) throw std::invalid_argument("spectrum must be a list of [tau, a] pairs");
  std::vector<double> taus;
  std::vector<double> jumps;
  for (const auto& pair : record) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("spectrum entries must be [tau, a] pairs");
    }
    taus.push_back(pair[0].get<double>());
    jumps.push_back(pair[1].get<double>());
  }
  return RiskSpectrum(std::move(taus), std::move(jumps));
}

std::string dump_spectrum(const RiskSpectrum& spectrum) { return spectrum_to_json(spectrum).dump(); }

RiskSpectrum parse_spectrum(const std::string& text) { return spectrum_from_json(json::parse(text)); }

json type_space_to_json(const TypeSpace& types) {
  json spectra = json::array();
  for (const auto& s : types.spectra()) spectra.push_back(spectrum_to_json(s));
  return {{"locations", std::vector<double>(types.locations().begin(), types.locations().end())},
          {"spectra", spectra}};
}

TypeSpace type_space_from_json(const json& record) {
  auto locations = record.at("locations").get<std::vector<double>>();
  std::vector<RiskSpectrum> spectra;
  for (const auto& s : record.at("spectra")) spectra.push_back(spectrum_from_json(s));
  return TypeSpace(std::move(locations), std::move(spectra));
}

}  // namespace stripe
