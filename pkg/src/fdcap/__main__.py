from fdcap.cli import main

main()
