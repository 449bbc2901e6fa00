// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <array>

#include "vovit/landmarks.hpp"

namespace vovit::landmarks {

namespace {

// Synthetic neutral face in iBUG-68 order (x right, y up, z towards the
// camera), inter-ocular distance 0.84. Mirrored in assets/face_template_68.json.
constexpr std::array<std::array<double, 3>, kNodes> kTemplate = {{
    {-0.95, 0.2, -0.45},
    {-0.931746, -0.034108, -0.3427},
    {-0.877686, -0.25922, -0.239524},
    {-0.789896, -0.466684, -0.144436},
    {-0.671751, -0.648528, -0.061091},
    {-0.527792, -0.797764, 0.007308},
    {-0.363549, -0.908655, 0.058134},
    {-0.185336, -0.976942, 0.089432},
    {0.0, -1.0, 0.1},
    {0.185336, -0.976942, 0.089432},
    {0.363549, -0.908655, 0.058134},
    {0.527792, -0.797764, 0.007308},
    {0.671751, -0.648528, -0.061091},
    {0.789896, -0.466684, -0.144436},
    {0.877686, -0.25922, -0.239524},
    {0.931746, -0.034108, -0.3427},
    {0.95, 0.2, -0.45},
    {-0.82, 0.58, 0.06508},
    {-0.66, 0.629497, 0.121287},
    {-0.5, 0.65, 0.166375},
    {-0.34, 0.629497, 0.201287},
    {-0.18, 0.58, 0.22508},
    {0.18, 0.58, 0.22508},
    {0.34, 0.629497, 0.201287},
    {0.5, 0.65, 0.166375},
    {0.66, 0.629497, 0.121287},
    {0.82, 0.58, 0.06508},
    {0.0, 0.4, 0.32},
    {0.0, 0.25, 0.4},
    {0.0, 0.1, 0.48},
    {0.0, -0.05, 0.56},
    {-0.2, -0.15, 0.348},
    {-0.1, -0.171213, 0.357},
    {0.0, -0.18, 0.4},
    {0.1, -0.171213, 0.357},
    {0.2, -0.15, 0.348},
    {-0.58, 0.35, 0.129775},
    {-0.5, 0.406292, 0.149246},
    {-0.34, 0.406292, 0.182846},
    {-0.26, 0.35, 0.196975},
    {-0.34, 0.293708, 0.186787},
    {-0.5, 0.293708, 0.153187},
    {0.26, 0.35, 0.196975},
    {0.34, 0.406292, 0.182846},
    {0.5, 0.406292, 0.149246},
    {0.58, 0.35, 0.129775},
    {0.5, 0.293708, 0.153187},
    {0.34, 0.293708, 0.186787},
    {-0.36, -0.5, 0.2351},
    {-0.311769, -0.42, 0.24688},
    {-0.18, -0.361436, 0.265368},
    {0.0, -0.34, 0.27422},
    {0.18, -0.361436, 0.265368},
    {0.311769, -0.42, 0.24688},
    {0.36, -0.5, 0.2351},
    {0.311769, -0.58, 0.23888},
    {0.18, -0.638564, 0.251512},
    {0.0, -0.66, 0.25822},
    {-0.18, -0.638564, 0.251512},
    {-0.311769, -0.58, 0.23888},
    {-0.25, -0.5, 0.241875},
    {-0.176777, -0.464645, 0.251393},
    {0.0, -0.45, 0.259875},
    {0.176777, -0.464645, 0.251393},
    {0.25, -0.5, 0.241875},
    {0.176777, -0.535355, 0.247857},
    {0.0, -0.55, 0.254875},
    {-0.176777, -0.535355, 0.247857},
}};

}  // namespace

const Points3& canonical_template() {
  static const Points3 points = [] {
    Points3 p(kNodes, 3);
    for (int i = 0; i < kNodes; ++i)
      for (int d = 0; d < 3; ++d) p(i, d) = kTemplate[i][d];
    return p;
  }();
  return points;
}

}  // namespace vovit::landmarks
