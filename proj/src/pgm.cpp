#include "t3s2s/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "t3s2s/error.hpp"

namespace t3s2s {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
bool next_header_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) break;
    }
    if (c == EOF) return false;
    do {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    } while (c != EOF && !std::isspace(c) && c != '#');
    if (c == '#') in.unget();
    return true;
}

int parse_header_int(std::istream& in, const char* what) {
    std::string tok;
    if (!next_header_token(in, tok)) {
        throw Error(ErrorKind::ParseError, std::string("pnm: missing ") + what);
    }
    try {
        size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, std::string("pnm: bad ") + what + " '" + tok + "'");
    }
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);

    std::string magic;
    if (!next_header_token(f, magic) || (magic != "P2" && magic != "P5")) {
        throw Error(ErrorKind::ParseError, "pnm: not a P2/P5 file: " + path);
    }
    GrayImage img;
    img.w = parse_header_int(f, "width");
    img.h = parse_header_int(f, "height");
    img.maxval = parse_header_int(f, "maxval");
    if (img.w < 1 || img.h < 1) {
        throw Error(ErrorKind::ParseError, "pnm: degenerate dimensions in " + path);
    }
    if (img.maxval < 1 || img.maxval > 255) {
        throw Error(ErrorKind::ParseError, "pnm: maxval must be in [1,255] in " + path);
    }
    size_t count = static_cast<size_t>(img.w) * img.h;
    img.px.resize(count);

    if (magic == "P5") {
        // exactly one whitespace byte separates the header from the raster
        f.read(reinterpret_cast<char*>(img.px.data()), static_cast<std::streamsize>(count));
        if (static_cast<size_t>(f.gcount()) != count) {
            throw Error(ErrorKind::ParseError, "pnm: truncated raster in " + path);
        }
    } else {
        for (size_t i = 0; i < count; ++i) {
            int v = parse_header_int(f, "sample");
            if (v > img.maxval) {
                throw Error(ErrorKind::ParseError, "pnm: sample exceeds maxval in " + path);
            }
            img.px[i] = static_cast<uint8_t>(v);
        }
    }
    return img;
}

void write_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot write " + path);
    f << "P5\n" << img.w << " " << img.h << "\n" << img.maxval << "\n";
    f.write(reinterpret_cast<const char*>(img.px.data()),
            static_cast<std::streamsize>(img.px.size()));
    if (!f) throw Error(ErrorKind::IoError, "short write to " + path);
}

RgbImage read_ppm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);

    std::string magic;
    if (!next_header_token(f, magic) || magic != "P6") {
        throw Error(ErrorKind::ParseError, "pnm: not a P6 file: " + path);
    }
    RgbImage img;
    img.w = parse_header_int(f, "width");
    img.h = parse_header_int(f, "height");
    int maxval = parse_header_int(f, "maxval");
    if (img.w < 1 || img.h < 1 || maxval != 255) {
        throw Error(ErrorKind::ParseError, "pnm: unsupported P6 header in " + path);
    }
    size_t count = static_cast<size_t>(img.w) * img.h * 3;
    img.px.resize(count);
    f.read(reinterpret_cast<char*>(img.px.data()), static_cast<std::streamsize>(count));
    if (static_cast<size_t>(f.gcount()) != count) {
        throw Error(ErrorKind::ParseError, "pnm: truncated raster in " + path);
    }
    return img;
}

void render_heatmap(const std::vector<double>& values, int h, int w, const std::string& path) {
    if (h < 1 || w < 1 || values.size() != static_cast<size_t>(h) * w) {
        throw Error(ErrorKind::DimensionMismatch, "render_heatmap: shape mismatch");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFiniteInput, "render_heatmap: non-finite value");
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    GrayImage img;
    img.h = h;
    img.w = w;
    img.maxval = 255;
    img.px.resize(values.size());
    if (lo == hi) {
        std::fill(img.px.begin(), img.px.end(), static_cast<uint8_t>(128));
    } else {
        double span = hi - lo;
        for (size_t i = 0; i < values.size(); ++i) {
            img.px[i] = static_cast<uint8_t>(std::llround((values[i] - lo) / span * 255.0));
        }
    }
    write_pgm(path, img);
}

}  // namespace t3s2s
