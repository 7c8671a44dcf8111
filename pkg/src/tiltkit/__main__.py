from tiltkit.cli import main

main()
