import sys
import subprocess



def in_venv():
    return sys.prefix != sys.base_prefix


DEMOS = [
    ['spectrum', '--graph', 'cycle-3', '--normalize'],
    ['cycle_asymptotics', '--n', '6'],
    ['surgery', 'reduce', 'sample_graphs/bowtie.json'],
    ['maximize', '--graph', 'paw', '--starts', '2'],
]


try:
    # Check for venv
    if in_venv():
        print('Using Virtualenv')
    else:
        print('Not using Virtualenv')
        exit()

    # Print the python version
    subprocess.run(['python3', '--version'])

    # Install dependencies
    print('Installing dependencies...')
    subprocess.run(['pip3', 'install', '-r', 'requirements.txt'])
    print("Dependencies installed!")

    # Run the test suite
    print('Running the tests...')
    result = subprocess.run(['python3', '-m', 'pytest'])
    if result.returncode != 0:
        print("Tests failed!")
        exit(result.returncode)
    print("Tests passed!")

    # Demo reports
    for args in DEMOS:
        print(f"Running {' '.join(args)}...")
        subprocess.run(['python3', 'manage.py', *args])

except KeyboardInterrupt:
    print("Process interrupted!")

print("Build Stopped!")
