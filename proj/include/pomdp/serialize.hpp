#pragma once

#include <json.hpp>

#include "pomdp/bounds.hpp"
#include "pomdp/curve_fit.hpp"
#include "pomdp/fsm.hpp"
#include "pomdp/grid.hpp"
#include "pomdp/pwlc.hpp"

namespace pomdp {

// Readers throw ParseError on malformed documents and ValidationError on
// inconsistent sizes.

/// {"vectors": [{"coeffs": [...], "action": a, "witnesses": [...]}, ...]}
nlohmann::json pwlc_to_json(const PwlcFn& f);
PwlcFn pwlc_from_json(const nlohmann::json& doc);

/// {"action": [...], "next": [[...]], "values": [[...]]}; values may be absent.
nlohmann::json fsm_to_json(const FsmController& c);
FsmController fsm_from_json(const nlohmann::json& doc);

/// {"num_states", "rule", "sigma", "points": [[...]], "values": [...]}
nlohmann::json grid_to_json(const GridValueFn& g);
GridValueFn grid_from_json(const nlohmann::json& doc);

/// {"num_states", "num_actions", "q": [[q(s,0), ...], ...], "v": [...]}
nlohmann::json qtable_to_json(const QTable& q);
QTable qtable_from_json(const nlohmann::json& doc);

/// {"num_states", "num_actions", "alpha": [[...], ...], "bellman_error", "iterations"}
nlohmann::json fib_to_json(const FibTable& t);
FibTable fib_from_json(const nlohmann::json& doc);

/// {"kind": "linq", "weights": [[...]]} or {"kind": "softmax", "k": k, "vectors": [[...]]}
nlohmann::json fit_model_to_json(const FitModel& mdl);
FitModel fit_model_from_json(const nlohmann::json& doc);

}  // namespace pomdp
