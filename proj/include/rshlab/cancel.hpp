#pragma once

#include <atomic>
#include <memory>

#include "rshlab/errors.hpp"

namespace rshlab {

/// Cooperative cancellation flag shared between a caller and a long-running solve.
/// Copies share the same flag. A default-constructed token can never be cancelled.
class CancelToken {
  public:
    CancelToken() = default;

    static CancelToken make() {
        CancelToken token;
        token.flag_ = std::make_shared<std::atomic<bool>>(false);
        return token;
    }

    void cancel() const {
        if (flag_)
            flag_->store(true, std::memory_order_relaxed);
    }

    bool cancelled() const {
        return flag_ && flag_->load(std::memory_order_relaxed);
    }

    void throw_if_cancelled() const {
        if (cancelled())
            throw Cancelled();
    }

  private:
    std::shared_ptr<std::atomic<bool>> flag_;
};

} // namespace rshlab
