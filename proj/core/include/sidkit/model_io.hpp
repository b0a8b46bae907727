#pragma once

#include <iosfwd>
#include <variant>

#include "sidkit/dialect_model.hpp"
#include "sidkit/joint_model.hpp"

namespace sidkit {

// Versioned text format: a `sidkit-model <version> <kind>` header followed
// by the feature configuration, label inventories and dense weight blocks.
// Doubles are written in shortest round-trip form, so save -> load is
// bit-exact. Loading a file with an unsupported version or kind throws
// ParseError.

inline constexpr int kModelFormatVersion = 1;

void save_joint_model(std::ostream& out, const JointLinearModel& model);
void save_dialect_classifier(std::ostream& out,
                             const DialectClassifier& classifier);

using AnyModel = std::variant<JointLinearModel, DialectClassifier>;
AnyModel load_model(std::istream& in);

JointLinearModel load_joint_model(std::istream& in);
DialectClassifier load_dialect_classifier(std::istream& in);

}  // namespace sidkit
