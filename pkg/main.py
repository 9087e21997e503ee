# main.py

from spinvac.cli import main

if __name__ == "__main__":
    main()
