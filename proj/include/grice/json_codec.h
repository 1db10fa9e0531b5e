#ifndef GRICE_JSON_CODEC_H_
#define GRICE_JSON_CODEC_H_

// JSON encodings shared by the trace files, transcripts, the HTTP API, and
// audit reports. Decoders throw Error(BadRequest) on malformed input.

#include "grice/dialogue.h"
#include "grice/norms.h"
#include "json.hpp"

namespace grice {

using nlohmann::json;

json to_json(const Assertion& a);
Assertion assertion_from_json(const json& j);

json to_json(const BreachEvent& e);
BreachEvent breach_from_json(const json& j);

json to_json(const RecoveryAct& a);
RecoveryAct act_from_json(const json& j);

json to_json(const Utterance& u);

// Flat lower_snake_case keys: the MonitorConfig fields plus
// inference_sweeps, extract_assertions, initial_beliefs.
json to_json(const DialogueConfig& c);
// Overwrites the fields present in `overrides`; unknown keys and wrong types
// throw Error(ConfigInvalid). The result is validated.
DialogueConfig apply_overrides(DialogueConfig base, const json& overrides);

json to_json(const TraceBlock& b);
TraceBlock block_from_json(const json& j, const Cdgs& grammar);

// One trace record per turn.
json to_json(const Turn& t);
Turn turn_from_json(const json& j, const Cdgs& grammar);

// Trace header record.
json header_json(const DialogueState& s);

}  // namespace grice

#endif  // GRICE_JSON_CODEC_H_
