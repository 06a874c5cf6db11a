"""The same workflows from the command line.

Each call below is what a shell user would type after ``kerrchain``.
"""
from kerrchain.cli import main

main(["table", "--chi", "1e-4", "--modes", "27"])
main(["fig4", "--modes", "range:1:9"])
main(["sweep", "--quantity", "qfi_over_t2", "--x", "logspace:-4:-2:3", "--modes", "11",
      "--compare", "coupled,independent,asymptotic"])
