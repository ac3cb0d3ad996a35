#pragma once

namespace wavelab {

enum class Axis { x = 0, y = 1 };

}  // namespace wavelab
