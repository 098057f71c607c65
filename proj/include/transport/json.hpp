#pragma once

#include <json.hpp>

namespace transport {

// Insertion-ordered JSON so serialized reports have a stable field order.
using Json = nlohmann::ordered_json;

}  // namespace transport
