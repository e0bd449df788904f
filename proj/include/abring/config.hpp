#pragma once

#include "abring/sweeps.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace abring {

// Line-oriented `key = value` configuration with `#` comments and the
// sections [geometry] [params] [sweep] [output]. Keys are unique across
// sections, so a key may also appear before any section header.
//
// Lists of sites or integers accept comma-separated items and inclusive
// ranges ("0-19, 25"); real-valued lists also accept "start:stop:step".

// Preset defaults overlaid with `text`, resolved and validated.
SweepConfig parse_config(std::string_view text);

// Overlays `text` onto `config` without validating, so layers can stack:
// preset < config file < command-line overrides.
void apply_config_text(SweepConfig& config, std::string_view text);

// One `key=value` override; the key may be qualified ("params.t_ar").
void apply_override(SweepConfig& config, std::string_view assignment);

// Derives the spacer geometry when mx > 0, syncs the Hamiltonian flux with
// flux_a, and validates. Idempotent.
void resolve_config(SweepConfig& config);

// Every resolved parameter, for the run manifest.
nlohmann::ordered_json describe_config(const SweepConfig& config);

Experiment parse_experiment(std::string_view name);

}  // namespace abring
