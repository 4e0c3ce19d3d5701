#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "stripe/risk.hpp"
#include "stripe/type_space.hpp"

namespace stripe {

// Spectra are stored as a list of [tau, a] pairs. Doubles are written in
// shortest round-trip form, so parse(dump(s)) reproduces s bit for bit.

nlohmann::json spectrum_to_json(const RiskSpectrum& spectrum);

/// Accepts the pair list, or an object naming a built-in family:
///   {"kind": "flat"}
///   {"kind": "avar", "level": alpha}
///   {"kind": "semideviation", "theta": t, "kappa": k}
RiskSpectrum spectrum_from_json(const nlohmann::json& record);

std::string dump_spectrum(const RiskSpectrum& spectrum);
RiskSpectrum parse_spectrum(const std::string& text);

/// {"locations": [...], "spectra": [spectrum, ...]}
nlohmann::json type_space_to_json(const TypeSpace& types);
TypeSpace type_space_from_json(const nlohmann::json& record);

}  // namespace stripe
