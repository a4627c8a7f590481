from tuned_quant.cli import main

main()
