#include "tlnum/io.hpp"

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace tln {

namespace it = boost::archive::iterators;

std::string base64_encode(const std::vector<unsigned char>& bytes) {
    using Enc = it::base64_from_binary<it::transform_width<std::vector<unsigned char>::const_iterator, 6, 8>>;
    std::string out(Enc(bytes.begin()), Enc(bytes.end()));
    out.append((3 - bytes.size() % 3) % 3, '=');
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    using Dec = it::transform_width<it::binary_from_base64<std::string::const_iterator>, 8, 6>;
    std::size_t pad = 0;
    while (pad < text.size() && text[text.size() - 1 - pad] == '=') ++pad;
    std::string body = text.substr(0, text.size() - pad);
    std::vector<unsigned char> out;
    try {
        out.assign(Dec(body.begin()), Dec(body.end()));
    } catch (const std::exception& e) {
        fail(ErrorKind::Io, std::string("invalid base64 block: ") + e.what());
    }
    std::size_t expect = (body.size() * 6) / 8;
    out.resize(expect);
    return out;
}

nlohmann::json sampled_to_json(const SampledFunction& f) {
    static_assert(std::endian::native == std::endian::little, "value blocks are written little-endian");
    nlohmann::json j;
    const Grid& g = f.grid;
    std::vector<double> lo, hi;
    std::vector<int> shape;
    for (int i = 0; i < g.d; ++i) {
        lo.push_back(g.lo[i]);
        hi.push_back(g.lo[i] + g.n[i] * g.h);
        shape.push_back(g.n[i]);
    }
    j["h"] = g.h;
    j["bbox"] = {{"lo", lo}, {"hi", hi}};
    j["shape"] = shape;
    j["domain"] = f.domain;
    j["arity"] = f.arity;
    std::vector<unsigned char> vbytes(f.values.size() * sizeof(double));
    if (!vbytes.empty()) std::memcpy(vbytes.data(), f.values.data(), vbytes.size());
    std::vector<unsigned char> mbytes(f.present.begin(), f.present.end());
    j["values"] = base64_encode(vbytes);
    j["mask"] = base64_encode(mbytes);
    return j;
}

SampledFunction sampled_from_json(const nlohmann::json& j) {
    try {
        auto lo = j.at("bbox").at("lo").get<std::vector<double>>();
        auto hi = j.at("bbox").at("hi").get<std::vector<double>>();
        int d = static_cast<int>(lo.size());
        if (d < 1 || d > kMaxDim || hi.size() != lo.size()) fail(ErrorKind::Io, "bad bbox");
        Point plo{}, phi{};
        for (int i = 0; i < d; ++i) {
            plo[i] = lo[static_cast<std::size_t>(i)];
            phi[i] = hi[static_cast<std::size_t>(i)];
        }
        Grid g = Grid::over_box(d, plo, phi, j.at("h").get<double>());
        SampledFunction f = SampledFunction::blank(g, j.at("arity").get<int>(), j.value("domain", std::string()));
        auto v = base64_decode(j.at("values").get<std::string>());
        auto m = base64_decode(j.at("mask").get<std::string>());
        if (v.size() != f.values.size() * sizeof(double) || m.size() != f.present.size())
            fail(ErrorKind::Io, "value or mask block has the wrong length");
        if (!v.empty()) std::memcpy(f.values.data(), v.data(), v.size());
        for (std::size_t i = 0; i < m.size(); ++i) f.present[i] = m[i] ? 1 : 0;
        return f;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Io, std::string("malformed sampled-function file: ") + e.what());
    }
}

void write_sampled(const std::string& path, const SampledFunction& f, const nlohmann::json& provenance) {
    nlohmann::json j = sampled_to_json(f);
    if (!provenance.is_null()) j["provenance"] = provenance;
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path);
    out << j.dump() << "\n";
    if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

SampledFunction read_sampled(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Io, "cannot parse " + path + ": " + e.what());
    }
    return sampled_from_json(j);
}

}
