#include "lifs/qtt.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace lifs {

std::array<std::array<double, 2>, 2> QTTCore::mat(int digit) const {
    if (digit != 0 && digit != 1) throw Error("digit must be 0 or 1");
    return {{{s[digit], lambda[digit]}, {0.0, 1.0}}};
}

std::string QTTCore::to_json() const {
    nlohmann::json j;
    j["S"] = {s[0], s[1]};
    j["lambda"] = {lambda[0], lambda[1]};
    j["f0"] = f0;
    return j.dump(2);
}

QTTCore QTTCore::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    return build_qtt(j.at("lambda")[0].get<double>(), j.at("lambda")[1].get<double>(),
                     j.at("S")[0].get<double>(), j.at("S")[1].get<double>());
}

QTTCore build_qtt(double lambda1, double lambda2, double s1, double s2) {
    if (!(std::abs(s1) < 1.0 && std::abs(s2) < 1.0))
        throw NotContractive("|S_1|, |S_2| must be < 1");
    QTTCore c;
    c.s = {s1, s2};
    c.lambda = {lambda1, lambda2};
    c.f0 = lambda1 / (1.0 - s1);
    return c;
}

double qtt_eval(const QTTCore& core, const std::vector<int>& digits) {
    // partial products of the 2x2 cores keep bottom row (0, 1); carry the
    // top row (a, b) only
    double a = 1.0, b = 0.0;
    for (int d : digits) {
        if (d != 0 && d != 1) throw Error("digit must be 0 or 1");
        b += a * core.lambda[d];
        a *= core.s[d];
    }
    return a * core.f0 + b;
}

std::vector<double> qtt_eval_grid(const QTTCore& core, int d) {
    if (d < 0 || d > 30) throw Error("digit count out of range");
    const long n = 1L << d;
    std::vector<double> out(n);
    std::vector<int> digits(d);
    for (long j = 0; j < n; ++j) {
        for (int k = 0; k < d; ++k) digits[k] = static_cast<int>(j >> (d - 1 - k) & 1);
        out[j] = qtt_eval(core, digits);
    }
    return out;
}

std::string qtt_grid_csv(const QTTCore& core, int d) {
    std::vector<double> v = qtt_eval_grid(core, d);
    std::ostringstream os;
    os << "x,value\n";
    for (std::size_t j = 0; j < v.size(); ++j)
        os << format_full(std::ldexp(static_cast<double>(j), -d)) << "," << format_full(v[j])
           << "\n";
    return os.str();
}

int qtt_rank_report(const QTTCore& core) {
    bool zero = core.s[0] == 0.0 && core.s[1] == 0.0 && core.lambda[0] == 0.0 &&
                core.lambda[1] == 0.0;
    return zero ? 1 : 2;
}

}  // namespace lifs
