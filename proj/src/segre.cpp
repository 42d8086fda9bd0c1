#include "bisyz/segre.hpp"

#include <map>
#include <mutex>

namespace bisyz {

const SegreBasis& basis(int n) {
    if (n < 0) throw std::invalid_argument("basis: negative degree");
    static std::mutex lock;
    static std::map<int, std::unique_ptr<SegreBasis>> memo;
    std::lock_guard guard(lock);
    auto& slot = memo[n];
    if (!slot) {
        auto b = std::make_unique<SegreBasis>();
        b->degree = n;
        for (int a = n; a >= 0; --a)
            for (int bb = n - a; bb >= 0; --bb)
                for (int c = n - a - bb; c >= 0; --c) {
                    int e = n - a - bb - c;
                    if (a * e != 0) continue;
                    b->index.emplace(mono::make({a, bb, c, e}), static_cast<int>(b->monomials.size()));
                    b->monomials.push_back(mono::make({a, bb, c, e}));
                }
        slot = std::move(b);
    }
    return *slot;
}

}  // namespace bisyz
