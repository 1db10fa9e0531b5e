#include "grice/dialogue.h"
#include "grice/error.h"

namespace grice {

std::string_view to_string(ActTag tag) {
  switch (tag) {
    case ActTag::Interrupt: return "Interrupt";
    case ActTag::AskForMore: return "AskForMore";
    case ActTag::FollowNewTopic: return "FollowNewTopic";
    case ActTag::ResumePreviousTopic: return "ResumePreviousTopic";
    case ActTag::Clarify: return "Clarify";
    case ActTag::Challenge: return "Challenge";
  }
  return "?";
}

ActTag parse_act_tag(std::string_view name) {
  for (auto t : {ActTag::Interrupt, ActTag::AskForMore, ActTag::FollowNewTopic,
                 ActTag::ResumePreviousTopic, ActTag::Clarify,
                 ActTag::Challenge}) {
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::BadRequest, "unknown act tag '" + std::string(name) + "'");
}

//   Quantity/TooSparse     always               AskForMore
//   Quantity/TooDetailed   always               Interrupt, human -> <=1
//   Quality/Unsupported    always               Challenge
//   Quality/Contradiction  always               Clarify
//   Relation/OffTopic      severity <  resume   FollowNewTopic
//   Relation/OffTopic      severity >= resume   ResumePreviousTopic
//   Manner/TooLong         severity >= interr.  Interrupt, human -> <=1
//   Manner/TooLong         severity <  interr.  (nothing)
//   Manner/Ambiguous       always               Clarify
std::vector<RecoveryAct> decide_acts(std::span<const BreachEvent> breaches,
                                     const MonitorConfig& cfg) {
  const ModeSwitch constrain_human{"human", DerivationMode::at_most(1)};
  std::vector<RecoveryAct> acts;
  for (std::size_t i = 0; i < breaches.size(); ++i) {
    const auto& b = breaches[i];
    const int by = static_cast<int>(i);
    switch (b.kind) {
      case BreachKind::TooSparse:
        acts.push_back({ActTag::AskForMore, by, std::nullopt});
        break;
      case BreachKind::TooDetailed:
        acts.push_back({ActTag::Interrupt, by, constrain_human});
        break;
      case BreachKind::Unsupported:
        acts.push_back({ActTag::Challenge, by, std::nullopt});
        break;
      case BreachKind::Contradiction:
        acts.push_back({ActTag::Clarify, by, std::nullopt});
        break;
      case BreachKind::OffTopic:
        acts.push_back({b.severity < cfg.severity_resume
                            ? ActTag::FollowNewTopic
                            : ActTag::ResumePreviousTopic,
                        by, std::nullopt});
        break;
      case BreachKind::TooLong:
        if (b.severity >= cfg.severity_interrupt) {
          acts.push_back({ActTag::Interrupt, by, constrain_human});
        }
        break;
      case BreachKind::Ambiguous:
        acts.push_back({ActTag::Clarify, by, std::nullopt});
        break;
    }
  }
  return acts;
}

}  // namespace grice
