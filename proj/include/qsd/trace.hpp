#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qsd {

class TransitionTrace {
public:
    void push_back(double t, double p_target, double p_residual, double norm_error)
    {
        require_finite(t, "trace time");
        if (!times_.empty() && !(t > times_.back()))
            throw InvalidParameter("trace times must be strictly increasing");
        times_.push_back(t);
        p_target_.push_back(require_finite(p_target, "p_target"));
        p_residual_.push_back(require_finite(p_residual, "p_residual"));
        norm_error_.push_back(require_finite(norm_error, "norm_error"));
    }

    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& p_target() const { return p_target_; }
    const std::vector<double>& p_residual() const { return p_residual_; }
    const std::vector<double>& norm_error() const { return norm_error_; }

    void write_csv(std::ostream& os) const
    {
        os << "t,p_target,p_residual,norm_error\n";
        char buf[128];
        for (std::size_t k = 0; k < size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", times_[k], p_target_[k], p_residual_[k],
                          norm_error_[k]);
            os << buf;
        }
    }

    void write_csv(const std::string& path) const
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw IoError("cannot open '" + path + "' for writing");
        write_csv(os);
        if (!os)
            throw IoError("write to '" + path + "' failed");
    }

private:
    std::vector<double> times_, p_target_, p_residual_, norm_error_;
};

} // namespace qsd
