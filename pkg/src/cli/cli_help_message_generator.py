class CLIHelpMessageGenerator:
    def generate(self):
        return (
            "Commands and Arguments\n\n"
            "  gen                          Sample d random perfect matchings per graph.\n"
            "     --n, --d, --count         Size, degree and number of graphs.\n"
            "     --graph-dir               Directory of the graph files (default: graphs).\n"
            "     --i-max                   Count even cycles up to this length.\n\n"
            "  tree                         Fixed points p*, p1, p2 of the tree recursion.\n"
            "     --d, --lambda-grid        Degree and activities (start:stop:step or a,b,c).\n\n"
            "  exponents ACTION             phi1-landscape | stationary | verify-polys\n"
            "     --d, --lambda             Degree and activity.\n"
            "     --alpha, --beta           Densities of 'stationary' (default: 1/d).\n"
            "     --n-starts, --radius      Multistart count and optional neighbourhood scan.\n\n"
            "  moments ACTION               ratio | tau | conditioning\n"
            "     --n-list                  Sizes of 'ratio' (n alpha and n beta must be integers).\n"
            "     --i-max, --strict         Cycle bound of 'conditioning'; strict quadrature for 'tau'.\n\n"
            "  enumerate ACTION             profile | barrier | gap\n"
            "     --graph, --lambda, --t    Graph file, activity, barrier threshold.\n\n"
            "  dynamics ACTION              run | crossing\n"
            "     --graph, --lambda         Graph file and activity.\n"
            "     --steps, --init           Horizon and starting state of 'run'.\n"
            "     --block-size, --runs      Block dynamics; number of crossing runs.\n\n"
            "  experiment                   Run a JSON-configured experiment into <out>/<experiment>/.\n"
            "     --config                  Configuration file.\n\n"
            "Common flags: --seed, --threads, --out, --format, --save-logs, --log-level\n\n"
            "Exit codes: 0 ok, 1 a check failed, 2 usage error.\n\n"
            "Examples:\n"
            "  python -m src.main tree --d 3 --lambda-grid 3.5:5:0.1 --out phase.csv\n"
            "  python -m src.main gen --n 12 --d 3 --seed 7 --count 5 --i-max 6\n"
            "  python -m src.main enumerate barrier --graph graphs/graph_n12_d3_s7_0.txt --lambda 4.4 --t 0\n"
            "  python -m src.main experiment --config configs/phase_diagram.json --threads 4\n"
        )
