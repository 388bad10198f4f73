#include "geodiag/extract.hpp"

#include <algorithm>

namespace geodiag {

std::size_t BinaryMap::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

namespace {

// Neighbours clockwise from north: p2..p9.
constexpr int kNx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

int transitions(const int n[8]) {
    int a = 0;
    for (int i = 0; i < 8; ++i) a += (n[i] == 0 && n[(i + 1) % 8] == 1) ? 1 : 0;
    return a;
}

}  // namespace

BinaryMap skeletonize(const BinaryMap& bin) {
    BinaryMap m = bin;
    std::vector<std::pair<int, int>> kill;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            kill.clear();
            for (int y = 0; y < m.height; ++y)
                for (int x = 0; x < m.width; ++x) {
                    if (!m.at(x, y)) continue;
                    int n[8];
                    int b = 0;
                    for (int i = 0; i < 8; ++i) {
                        n[i] = m.get(x + kNx[i], y + kNy[i]) ? 1 : 0;
                        b += n[i];
                    }
                    if (b < 2 || b > 6) continue;
                    if (transitions(n) != 1) continue;
                    // n[0]=p2 N, n[2]=p4 E, n[4]=p6 S, n[6]=p8 W
                    if (pass == 0) {
                        if (n[0] * n[2] * n[4] != 0) continue;
                        if (n[2] * n[4] * n[6] != 0) continue;
                    } else {
                        if (n[0] * n[2] * n[6] != 0) continue;
                        if (n[0] * n[4] * n[6] != 0) continue;
                    }
                    kill.emplace_back(x, y);
                }
            for (auto [x, y] : kill) m.at(x, y) = 0;
            changed = changed || !kill.empty();
        }
    }
    return m;
}

}  // namespace geodiag
