from shotmax.cli import run

# python -m shotmax simulate --which discrete --n 1024 --seed 7

if __name__ == "__main__":
    run()
