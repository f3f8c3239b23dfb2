// Copyright 2026 The segvote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <json.hpp>

#include "segvote/analysis.hpp"
#include "segvote/metrics.hpp"

namespace segvote {

/// {"num_classes": K, "counts": [[...], ...]} with counts[gt][pred].
nlohmann::json to_json(const ConfusionMatrix& matrix);
ConfusionMatrix matrix_from_json(const nlohmann::json& j);

/// {"per_class": [iou or null, ...], "miou": value or null}
nlohmann::json to_json(const IouBreakdown& breakdown);

nlohmann::json to_json(const ErrorReport& report);

/// Optional doubles map to null.
nlohmann::json optional_to_json(const std::optional<double>& v);

}  // namespace segvote
