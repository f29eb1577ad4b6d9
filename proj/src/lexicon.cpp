#include "t3s2s/keywords.hpp"

namespace t3s2s {

// Scene nouns the keyword extractor recognizes when a scene config does not
// name its instances. Plurals are separate entries; the tokenizer does not
// stem.
const std::set<std::string>& default_lexicon() {
    static const std::set<std::string> lexicon = {
        "alley",     "alleys",     "arch",      "arches",    "bank",      "banks",
        "barn",      "barns",      "bay",       "bays",      "beach",     "beaches",
        "bench",     "benches",    "boat",      "boats",     "boulder",   "boulders",
        "bridge",    "bridges",    "brook",     "brooks",    "bush",      "bushes",
        "cabin",     "cabins",     "cactus",    "cacti",     "camp",      "camps",
        "campfire",  "campfires",  "canal",     "canals",    "canyon",    "canyons",
        "castle",    "castles",    "cave",      "caves",     "cavern",    "caverns",
        "chapel",    "chapels",    "church",    "churches",  "city",      "cities",
        "cliff",     "cliffs",     "coast",     "coasts",    "cottage",   "cottages",
        "crater",    "craters",    "creek",     "creeks",    "crops",     "desert",
        "deserts",   "dock",       "docks",     "dune",      "dunes",     "farm",
        "farms",     "fence",      "fences",    "field",     "fields",    "fire",
        "fires",     "flower",     "flowers",   "forest",    "forests",   "fort",
        "forts",     "fountain",   "fountains", "garden",    "gardens",   "gate",
        "gates",     "glacier",    "glaciers",  "grass",     "grove",     "groves",
        "harbor",    "harbors",    "hedge",     "hedges",    "hill",      "hills",
        "house",     "houses",     "hut",       "huts",      "iceberg",   "icebergs",
        "island",    "islands",    "lagoon",    "lagoons",   "lake",      "lakes",
        "lava",      "lighthouse", "lighthouses", "log",     "logs",      "market",
        "markets",   "marsh",      "marshes",   "meadow",    "meadows",   "mill",
        "mills",     "mine",       "mines",     "monument",  "monuments", "mountain",
        "mountains", "mushroom",   "mushrooms", "oasis",     "oases",     "ocean",
        "oceans",    "orchard",    "orchards",  "palace",    "palaces",   "path",
        "paths",     "peak",       "peaks",     "peninsula", "peninsulas", "pier",
        "piers",     "plain",      "plains",    "plateau",   "plateaus",  "pond",
        "ponds",     "pool",       "pools",     "port",      "ports",     "pyramid",
        "pyramids",  "quarry",     "quarries",  "ravine",    "ravines",   "reef",
        "reefs",     "ridge",      "ridges",    "river",     "rivers",    "road",
        "roads",     "rock",       "rocks",     "ruins",     "sand",      "sea",
        "seas",      "shack",      "shacks",    "ship",      "ships",     "shore",
        "shores",    "shrine",     "shrines",   "slope",     "slopes",    "snow",
        "spring",    "springs",    "statue",    "statues",   "stone",     "stones",
        "stream",    "streams",    "street",    "streets",   "stump",     "stumps",
        "summit",    "summits",    "swamp",     "swamps",    "temple",    "temples",
        "tent",      "tents",      "tower",     "towers",    "town",      "towns",
        "trail",     "trails",     "tree",      "trees",     "tundra",    "valley",
        "valleys",   "village",    "villages",  "vineyard",  "vineyards", "volcano",
        "volcanoes", "wall",       "walls",     "waterfall", "waterfalls", "well",
        "wells",     "wheat",      "windmill",  "windmills", "wood",      "woods",
    };
    return lexicon;
}

}  // namespace t3s2s
