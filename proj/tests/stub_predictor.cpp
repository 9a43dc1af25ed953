// Wire-protocol test double: one JSON request per stdin line, one response
// per stdout line.
//
//   stub_predictor echo          previous mask back (empty without one)
//   stub_predictor gt MASK.png   always the ground truth
//   stub_predictor geodesic      the built-in predictor behind the wire
//   stub_predictor wrong-dims    a mask one column too wide
//   stub_predictor garbage       not JSON
//   stub_predictor crash         exits on the first request

#include "clicks2line/eval.hpp"
#include "clicks2line/io.hpp"
#include "clicks2line/predictor.hpp"
#include "clicks2line/rle.hpp"

#include <iostream>
#include <string>

using namespace c2l;
using nlohmann::json;

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: stub_predictor MODE [ARGS]\n";
        return 2;
    }
    const std::string mode = argv[1];
    std::optional<BinaryMask> gt;
    if (mode == "gt") {
        if (argc < 3) {
            return 2;
        }
        gt = foreground(read_label_mask(argv[2]));
    }

    std::string line;
    while (std::getline(std::cin, line)) {
        if (mode == "crash") {
            return 3;
        }
        if (mode == "garbage") {
            std::cout << "this is not json\n" << std::flush;
            continue;
        }
        const json req = json::parse(line);
        const int w = req.at("width").get<int>();
        const int h = req.at("height").get<int>();
        BinaryMask out(w, h);
        if (mode == "echo") {
            if (req.contains("prev_mask_rle")) {
                out = rle_decode(req["prev_mask_rle"].get<std::vector<std::int64_t>>(), w, h);
            }
        } else if (mode == "gt") {
            out = *gt;
        } else if (mode == "geodesic") {
            const Image image = decode_png(base64_decode(req.at("image_b64").get<std::string>()));
            std::vector<Annotation> anns;
            for (const auto& a : req.at("annotations")) {
                anns.push_back(annotation_from_json(a));
            }
            out = geodesic_predict({image, anns, nullptr});
        } else if (mode == "wrong-dims") {
            std::cout << json{{"width", w + 1}, {"height", h}, {"mask_rle", rle_encode(BinaryMask(w + 1, h))}}.dump()
                      << "\n"
                      << std::flush;
            continue;
        } else {
            std::cerr << "unknown mode " << mode << "\n";
            return 2;
        }
        std::cout << json{{"mask_rle", rle_encode(out)}}.dump() << "\n" << std::flush;
    }
    return 0;
}
